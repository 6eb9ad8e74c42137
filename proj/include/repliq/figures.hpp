#ifndef REPLIQ_FIGURES_HPP
#define REPLIQ_FIGURES_HPP

#include <string>
#include <vector>

#include "repliq/bounds.hpp"
#include "repliq/sim.hpp"

namespace repliq {

enum class FigureScale { desk, full };

// Writes the figure's data as one CSV per curve under outdir; returns the
// written paths. Desk scale caps simulations at 1e7 jobs (default 1e6).
std::vector<std::string> run_figure(const std::string& name, FigureScale scale,
                                    const std::string& outdir, uint64_t base_seed);

std::vector<std::string> figure_names();

// parameter builders shared with the tests
ReplicationSpec fig4_spec(char panel, int k);      // panel in {a,b,c,d}, K=4
BoundResult fig4_bound(char panel, int k);
SystemConfig fig4_sim_config(char panel, int k, int64_t n_jobs, uint64_t seed);

// Fig. 6 load convention: lambda_K = 0.75 mu / H_K keeps the fork-join side
// at utilization 0.75 for every K (a fixed rate would overload FJ past K=1).
double fig6_lambda(int K, double mu = 1.0);

} // namespace repliq

#endif
