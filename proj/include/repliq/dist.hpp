#ifndef REPLIQ_DIST_HPP
#define REPLIQ_DIST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "repliq/rng.hpp"

namespace repliq {

// Service / interarrival law. Immutable after construction.
struct Distribution {
    enum class Kind {
        Exponential,      // rate
        Pareto,           // alpha; survival x^-alpha on x >= 1
        Weibull,          // scale, shape; survival e^{-(x/scale)^shape}
        UniformZeroOne,
        Erlang,           // phases n, rate
        HyperExponential, // weights, rates
        Deterministic     // value
    };

    Kind kind = Kind::Exponential;
    double rate = 1.0;
    double alpha = 0.0;
    double scale = 0.0;
    double shape = 0.0;
    double value = 0.0;
    int n = 0;
    std::vector<double> weights;
    std::vector<double> rates;

    static Distribution exponential(double rate);
    static Distribution pareto(double alpha);
    static Distribution weibull(double scale, double shape);
    static Distribution uniform01();
    static Distribution erlang(int n, double rate);
    static Distribution hyperexp(std::vector<double> weights, std::vector<double> rates);
    static Distribution deterministic(double value);
};

// +inf for Pareto alpha <= 1
double mean(const Distribution& d);

double variance(const Distribution& d);

// P(X >= x), x >= 0
double survival(const Distribution& d, double x);

// E[e^{theta X}]; throws MgfDiverges at/past the convergence boundary
double mgf(const Distribution& d, double theta);

// E[e^{-theta X}], theta >= 0
double laplace(const Distribution& d, double theta);

// E[e^{theta min of k iid copies}]; closed form where the min stays in the
// family, otherwise 1 + theta * int e^{theta x} survival(x)^k dx
double min_order_mgf(const Distribution& d, int k, double theta);
double min_order_mgf_numeric(const Distribution& d, int k, double theta); // quadrature path, for cross-checks

// supremum of the MGF convergence region for the min of k iid copies
// (0 when no positive theta is admissible, +inf when every theta is)
double mgf_sup(const Distribution& d, int k = 1);

// one variate by inversion (Erlang as a sum of inverted exponentials,
// HyperExponential by inverting the phase choice first)
double sample(const Distribution& d, Rng& rng);

// flat text form, e.g. exp:rate=1.0  pareto:alpha=1.1  hyperexp:p=0.5,0.5;mu=1,2
std::string format_dist(const Distribution& d);
Distribution parse_dist(const std::string& text);

// Recursive CCDF fit of a hyperexponential to a Pareto tail: m phases with a
// geometric rate ladder anchored at m points spanning [x_lo, x_hi]; weights
// from collocation at the tail anchors plus total mass one.
Distribution fit_hyperexp_to_pareto(double alpha, int phases, double x_lo, double x_hi);

} // namespace repliq

#endif
