#ifndef REPLIQ_REPLICA_HPP
#define REPLIQ_REPLICA_HPP

#include "repliq/dist.hpp"
#include "repliq/errors.hpp"

namespace repliq {

// Service law of the k replicas of one task. Independent replicas draw iid
// from idio. Correlated replicas share one additive component:
// x_{i,j} = delta * y_i + (1 - delta) * y_{i,j}.
struct ReplicaModel {
    enum class Kind { Independent, AdditiveCorrelated };

    Kind kind = Kind::Independent;
    double delta = 0.0;
    Distribution shared;  // y_i     (AdditiveCorrelated)
    Distribution idio;    // y_{i,j}

    static ReplicaModel independent(Distribution task) {
        ReplicaModel m;
        m.kind = Kind::Independent;
        m.idio = std::move(task);
        return m;
    }

    static ReplicaModel correlated(double delta, Distribution shared, Distribution idio) {
        if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("replica delta must be in [0,1]");
        ReplicaModel m;
        m.kind = Kind::AdditiveCorrelated;
        m.delta = delta;
        m.shared = std::move(shared);
        m.idio = std::move(idio);
        return m;
    }
};

// min over the k replicas of one task
inline double sample_min_service(const ReplicaModel& m, int k, Rng& rng) {
    double shared_part = 0.0;
    double scale = 1.0;
    if (m.kind == ReplicaModel::Kind::AdditiveCorrelated) {
        shared_part = m.delta * sample(m.shared, rng);
        scale = 1.0 - m.delta;
    }
    double mn = sample(m.idio, rng);
    for (int j = 1; j < k; ++j) mn = std::min(mn, sample(m.idio, rng));
    return shared_part + scale * mn;
}

} // namespace repliq

#endif
