#ifndef REPLIQ_BOUNDS_HPP
#define REPLIQ_BOUNDS_HPP

#include <string>

#include "repliq/stability.hpp"

namespace repliq {

enum class Regime { ind, mkv, cor, mkv_cor, fj, fjr, deferred };

const char* regime_name(Regime r);

// Exponential tail bound P(r >= sigma) <= prefactor * e^{-theta sigma}.
// theta is the unique positive root of the regime's transform product
// Phi(theta) = 1; prefactor is the service-side MGF product at theta.
struct BoundResult {
    Regime regime = Regime::ind;
    double theta = 0.0;
    double prefactor = 1.0;
    bool stable = false;
    std::string diagnostic; // set when the root search hit a domain cap
};

BoundResult theta_ind(const ReplicationSpec& spec);
BoundResult theta_mkv(const ReplicationSpec& spec);
BoundResult theta_cor(const ReplicationSpec& spec);
BoundResult theta_mkv_cor(const ReplicationSpec& spec);

// dispatch on arrival / replica variants
BoundResult compute_bound(const ReplicationSpec& spec);

double bound_ccdf(const BoundResult& b, double sigma);

// smallest sigma with bound <= eps: max(0, ln(prefactor/eps)/theta)
double quantile(const BoundResult& b, double eps);

// K=2 M/M mean response times of the four assignment policies
struct MmMeans {
    double rnd, rr, mm2, rep;
};
MmMeans mm_reference(double rho, double mu);

// Blocking fork-join: single queue with service max of K iid Exp(mu).
// Stability uses the exact harmonic sum H_K; the rough ln K threshold is
// reported alongside in the diagnostic when unstable.
BoundResult fj_bound(int K, double mu, const ArrivalProcess& arrivals);

// Fork-join with replication: job service is Erlang(K, K mu)
BoundResult fjr_bound(int K, double mu, const ArrivalProcess& arrivals);

double harmonic(int K);

// Two-server deferred replication (offset Delta): the replica starts Delta
// after the original's start, if the original is still running then.
struct DeferredConfig {
    enum class Kind { Independent, Correlated };

    Kind kind = Kind::Independent;
    double offset = 0.0;  // Delta, may be +inf
    double lambda = 0.0;  // arrival rate (Poisson)
    Distribution original; // x (Independent)
    Distribution backup;   // y (Independent)
    double delta = 0.0;    // correlation degree (Correlated)
    double mu = 1.0;       // rate of x, y, z     (Correlated)

    static DeferredConfig independent(double offset, double lambda,
                                      Distribution original, Distribution backup);
    static DeferredConfig correlated(double offset, double lambda, double delta, double mu);
};

struct DeferredUsage {
    double rho1, rho2, usage;
};

// closed forms for the exponential models, quadrature otherwise
DeferredUsage deferred_usage(const DeferredConfig& cfg);

// E[e^{theta min(X1, Delta + X2)}] of the effective service at server 1
double deferred_effective_mgf(const DeferredConfig& cfg, double theta);

BoundResult deferred_theta(const DeferredConfig& cfg);
double deferred_bound(const DeferredConfig& cfg, double eps);

} // namespace repliq

#endif
