#include <algorithm>
#include <cmath>
#include <sstream>

#include "repliq/errors.hpp"
#include "repliq/kernels.hpp"
#include "repliq/sim.hpp"

namespace repliq {

const char* policy_name(Policy p) {
    switch (p) {
        case Policy::replicated_batches: return "replicated_batches";
        case Policy::random_dispatch: return "random";
        case Policy::round_robin: return "round_robin";
        case Policy::central_queue: return "central_queue";
        case Policy::fork_join: return "fork_join";
        case Policy::fork_join_replication: return "fjr";
        case Policy::deferred: return "deferred";
    }
    return "?";
}

void SystemConfig::validate() const {
    if (K < 1 || k < 1 || K % k != 0) throw DomainError("config needs k | K");
    if (n_jobs < 1) throw EmptySample("config needs n_jobs >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction <= 0.5))
        throw DomainError("warmup_fraction must be in [0, 0.5]");
}

std::string config_echo_string(const SystemConfig& cfg) {
    std::ostringstream os;
    os << "policy=" << policy_name(cfg.policy) << " K=" << cfg.K << " k=" << cfg.k;
    if (cfg.arrivals.kind == ArrivalProcess::Kind::Renewal)
        os << " arrivals=" << format_dist(cfg.arrivals.inter);
    else
        os << " arrivals=mmpp(p=" << cfg.arrivals.p << ",lact=" << cfg.arrivals.lambda_act
           << ",liact=" << cfg.arrivals.lambda_iact << ")";
    if (cfg.replicas.kind == ReplicaModel::Kind::Independent)
        os << " service=" << format_dist(cfg.replicas.idio);
    else
        os << " service=cor(delta=" << cfg.replicas.delta
           << ",shared=" << format_dist(cfg.replicas.shared)
           << ",idio=" << format_dist(cfg.replicas.idio) << ")";
    os << " purging=" << (cfg.purging == Purging::purging ? "purging" : "non_purging");
    if (cfg.policy == Policy::deferred) os << " Delta=" << cfg.replication_offset;
    if (cfg.policy == Policy::fork_join_replication) os << " fjr_delta=" << cfg.fjr_delta;
    os << " n_jobs=" << cfg.n_jobs << " seed=" << cfg.seed
       << " warmup=" << cfg.warmup_fraction;
    return os.str();
}

SimResult summarize(std::vector<double> samples, const SystemConfig& cfg,
                    std::vector<double> busy_fraction) {
    if (samples.empty()) throw EmptySample("simulation produced no samples");
    const int64_t discard = int64_t(std::floor(cfg.warmup_fraction * double(samples.size())));
    std::vector<double> kept(samples.begin() + discard, samples.end());

    SimResult r;
    r.count = int64_t(kept.size());
    MeanVar mv = mean_variance(kept);
    r.mean = mv.mean;
    r.variance = mv.variance;

    std::vector<double> sorted = kept;
    std::sort(sorted.begin(), sorted.end());
    r.q50 = sorted_quantile(sorted, 0.50);
    r.q90 = sorted_quantile(sorted, 0.90);
    r.q95 = sorted_quantile(sorted, 0.95);
    r.q99 = sorted_quantile(sorted, 0.99);
    r.sigma = sigma_grid(sorted);
    std::vector<int64_t> counts = tail_counts(sorted, r.sigma);
    r.ccdf.resize(counts.size());
    for (size_t j = 0; j < counts.size(); ++j)
        r.ccdf[j] = double(counts[j]) / double(sorted.size());

    r.busy_fraction = std::move(busy_fraction);
    r.seed = cfg.seed;
    r.config_echo = config_echo_string(cfg);
    return r;
}

SimResult simulate(const SystemConfig& cfg) {
    cfg.validate();
    switch (cfg.policy) {
        case Policy::replicated_batches:
            return cfg.purging == Purging::purging ? simulate_replicated(cfg)
                                                   : simulate_nonpurging(cfg);
        case Policy::random_dispatch:
        case Policy::round_robin:
        case Policy::central_queue:
            return simulate_policies(cfg);
        case Policy::fork_join:
            return simulate_fork_join(cfg);
        case Policy::fork_join_replication:
            return simulate_fjr(cfg);
        case Policy::deferred:
            return simulate_deferred(cfg);
    }
    throw DomainError("unknown policy");
}

} // namespace repliq
