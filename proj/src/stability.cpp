#include "repliq/stability.hpp"

#include <cmath>
#include <limits>

#include "repliq/errors.hpp"
#include "repliq/quadrature.hpp"

namespace repliq {

ReplicationSpec::ReplicationSpec(int K_, int k_, ReplicaModel service_, ArrivalProcess arrivals_)
    : K(K_), k(k_), service(std::move(service_)), arrivals(std::move(arrivals_)) {
    if (K < 1 || k < 1) throw DomainError("replication spec needs K, k >= 1");
    if (K % k != 0) throw DomainError("replication factor k must divide K");
}

double min_mean_numeric(const Distribution& d, int k) {
    return integrate_to_inf([&](double x) { return std::pow(survival(d, x), k); }, 1e-10);
}

double min_mean(const Distribution& d, int k) {
    if (k < 1) throw DomainError("min_mean needs k >= 1");
    switch (d.kind) {
        case Distribution::Kind::Exponential: return 1.0 / (k * d.rate);
        case Distribution::Kind::UniformZeroOne: return 1.0 / (k + 1.0);
        case Distribution::Kind::Pareto:
            if (k * d.alpha <= 1.0) throw DivergentMean("min of Pareto replicas has infinite mean (k*alpha <= 1)");
            return 1.0 + 1.0 / (k * d.alpha - 1.0);
        case Distribution::Kind::Weibull:
            return d.scale * std::pow(double(k), -1.0 / d.shape) * std::exp(std::lgamma(1.0 + 1.0 / d.shape));
        case Distribution::Kind::Deterministic: return d.value;
        default: return min_mean_numeric(d, k);
    }
}

double min_mean_correlated(const ReplicaModel& m, int k) {
    if (m.kind != ReplicaModel::Kind::AdditiveCorrelated)
        throw WrongVariant("min_mean_correlated needs an AdditiveCorrelated model");
    double shared_mean = mean(m.shared);
    if (std::isinf(shared_mean) && m.delta > 0.0)
        throw DivergentMean("shared component has infinite mean");
    return m.delta * (m.delta > 0.0 ? shared_mean : 0.0) + (1.0 - m.delta) * min_mean(m.idio, k);
}

double min_mean_service(const ReplicaModel& m, int k) {
    if (m.kind == ReplicaModel::Kind::Independent) return min_mean(m.idio, k);
    return min_mean_correlated(m, k);
}

double utilization(const ReplicationSpec& spec) {
    return (double(spec.k) / spec.K) * min_mean_service(spec.service, spec.k) /
           mean_interarrival(spec.arrivals);
}

std::vector<int> divisors(int K) {
    std::vector<int> out;
    for (int k = 1; k <= K; ++k)
        if (K % k == 0) out.push_back(k);
    return out;
}

int best_k(const ReplicaModel& service, int K) {
    if (K < 1) throw DomainError("best_k needs K >= 1");
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int k : divisors(K)) {
        double v;
        try {
            v = k * min_mean_service(service, k);
        } catch (const DivergentMean&) {
            continue;
        }
        if (best == 0 || v < best_val * (1.0 - 1e-12)) {
            best_val = v;
            best = k;
        }
    }
    if (best == 0) throw AllUnstable("every replication factor has a divergent min-mean");
    return best;
}

int best_k(const Distribution& service, int K) {
    return best_k(ReplicaModel::independent(service), K);
}

} // namespace repliq
