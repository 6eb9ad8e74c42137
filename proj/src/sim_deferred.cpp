#include <algorithm>
#include <cmath>
#include <numeric>

#include "repliq/errors.hpp"
#include "repliq/kernels.hpp"
#include "repliq/sim.hpp"

namespace repliq {

// Two servers. Originals queue FIFO at server 1; a replica starts at server 2
// exactly Delta after the original's service start, if the original is still
// in service then. First completion purges the other copy, so both servers
// free simultaneously whenever a replica ran: server 2 needs no queue.
SimResult simulate_deferred(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.K != 2) throw DomainError("deferred policy is a two-server model");
    const double offset = cfg.replication_offset;
    const int64_t n = cfg.n_jobs;

    const bool correlated = cfg.replicas.kind == ReplicaModel::Kind::AdditiveCorrelated;
    const double delta = correlated ? cfg.replicas.delta : 0.0;

    Rng rng(derive_seed(cfg.seed, 0));
    std::vector<double> inter(n);
    {
        ArrivalGen gen(cfg.arrivals, rng);
        for (int64_t i = 0; i < n; ++i) inter[i] = gen.next();
    }

    // per-job effective service at server 1 and replica busy time at server 2
    std::vector<double> service(n), busy2(n);
    for (int64_t i = 0; i < n; ++i) {
        double z = correlated && delta > 0.0 ? sample(cfg.replicas.shared, rng) : 0.0;
        double x1 = (1.0 - delta) * sample(cfg.replicas.idio, rng) + delta * z;
        if (std::isinf(offset) || x1 <= offset) {
            service[i] = x1;
            busy2[i] = 0.0;
        } else {
            double x2 = (1.0 - delta) * sample(cfg.replicas.idio, rng) + delta * z;
            service[i] = std::min(x1, offset + x2);
            busy2[i] = std::min(x1 - offset, x2);
        }
    }

    std::vector<double> wait(n);
    lindley_waits(service, inter, wait);
    std::vector<double> resp(n);
    for (int64_t i = 0; i < n; ++i) resp[i] = wait[i] + service[i];

    const double span = std::accumulate(inter.begin(), inter.end(), 0.0);
    SimResult r = summarize(std::move(resp), cfg, {});
    r.rho1 = std::accumulate(service.begin(), service.end(), 0.0) / span;
    r.rho2 = std::accumulate(busy2.begin(), busy2.end(), 0.0) / span;
    r.usage = r.rho1 + r.rho2;
    r.busy_fraction = {r.rho1, r.rho2};
    return r;
}

} // namespace repliq
