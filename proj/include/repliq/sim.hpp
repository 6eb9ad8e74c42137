#ifndef REPLIQ_SIM_HPP
#define REPLIQ_SIM_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "repliq/arrival.hpp"
#include "repliq/replica.hpp"

namespace repliq {

enum class Policy {
    replicated_batches,
    random_dispatch,
    round_robin,
    central_queue,
    fork_join,
    fork_join_replication,
    deferred
};

enum class Purging { purging, non_purging };

const char* policy_name(Policy p);

struct SystemConfig {
    int K = 1;
    int k = 1;
    ArrivalProcess arrivals;
    ReplicaModel replicas;
    Policy policy = Policy::replicated_batches;
    Purging purging = Purging::purging;
    double replication_offset = 0.0; // deferred: Delta (inf = never replicate)
    double fjr_delta = 0.0;          // FJR: correlation degree of replicas
    int64_t n_jobs = 0;
    uint64_t seed = 1;
    double warmup_fraction = 0.01;

    void validate() const;
};

struct SimResult {
    int64_t count = 0; // post-warmup samples
    double mean = 0.0;
    double variance = 0.0;
    double q50 = 0.0, q90 = 0.0, q95 = 0.0, q99 = 0.0;
    std::vector<double> sigma;       // geometric grid
    std::vector<double> ccdf;        // P(r >= sigma)
    std::vector<double> busy_fraction; // per simulated server
    double rho1 = std::numeric_limits<double>::quiet_NaN(); // deferred only
    double rho2 = std::numeric_limits<double>::quiet_NaN();
    double usage = std::numeric_limits<double>::quiet_NaN();
    uint64_t seed = 0;
    std::string config_echo;
};

// post-warmup samples -> summary; busy fractions are passed through
SimResult summarize(std::vector<double> samples, const SystemConfig& cfg,
                    std::vector<double> busy_fraction);

// dispatch on cfg.policy
SimResult simulate(const SystemConfig& cfg);

// Per-batch response recursion r_{i+1} = min service + max(0, r_i - batch
// interarrival); purging keeps the k servers of a batch in lockstep, so one
// batch carries the whole marginal law. Returns raw samples (pre-warmup).
std::vector<double> replicated_response_samples(const SystemConfig& cfg,
                                                std::vector<double>* busy_out = nullptr);

SimResult simulate_replicated(const SystemConfig& cfg);
SimResult simulate_nonpurging(const SystemConfig& cfg);
SimResult simulate_policies(const SystemConfig& cfg);
SimResult simulate_fork_join(const SystemConfig& cfg);
SimResult simulate_fjr(const SystemConfig& cfg);
SimResult simulate_deferred(const SystemConfig& cfg);

// Event-driven implementation of the replicated-batch system (purging and
// non-purging); validates the recursion-based path.
SimResult simulate_replicated_event_driven(const SystemConfig& cfg);
std::vector<double> replicated_event_driven_samples(const SystemConfig& cfg);

// FJR intra-job service sampler (job service = time until all K originals
// are done); exposed for the Erlang(K, K mu) checks.
std::vector<double> fjr_job_service_samples(int K, double mu, double delta,
                                            int64_t n, uint64_t seed);

std::string config_echo_string(const SystemConfig& cfg);

} // namespace repliq

#endif
