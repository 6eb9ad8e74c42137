#include <algorithm>
#include <cmath>
#include <numeric>

#include "repliq/kernels.hpp"
#include "repliq/sim.hpp"

namespace repliq {

namespace {
constexpr int64_t kGenBlock = 1 << 14;

// Per-job replica service draws, generated in fixed blocks with per-block
// sub-streams so the sequence does not depend on the thread count. Draw order
// within a job: shared component (if correlated), then the k replicas in
// server order. x may be null when only the min is wanted.
void fill_services(const ReplicaModel& m, int k, int64_t n, uint64_t seed,
                   std::vector<double>* x, std::vector<double>& min_out) {
    min_out.resize(n);
    if (x) x->resize(n * k);
    const int64_t nblocks = (n + kGenBlock - 1) / kGenBlock;
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < nblocks; ++b) {
        Rng rng(derive_seed(seed, uint64_t(b)));
        const int64_t lo = b * kGenBlock, hi = std::min(n, lo + kGenBlock);
        for (int64_t i = lo; i < hi; ++i) {
            double shared_part = 0.0, scale = 1.0;
            if (m.kind == ReplicaModel::Kind::AdditiveCorrelated) {
                shared_part = m.delta * sample(m.shared, rng);
                scale = 1.0 - m.delta;
            }
            double mn = std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                double v = shared_part + scale * sample(m.idio, rng);
                if (x) (*x)[i * k + j] = v;
                mn = std::min(mn, v);
            }
            min_out[i] = mn;
        }
    }
}

// batch interarrivals: sums of K/k consecutive interarrivals of one stream.
// Renewal streams are generated blockwise; the Markov chain is sequential.
void fill_batch_inter(const ArrivalProcess& a, int batch, int64_t n, uint64_t seed,
                      std::vector<double>& out) {
    out.resize(n);
    if (a.kind == ArrivalProcess::Kind::Renewal) {
        const int64_t nblocks = (n + kGenBlock - 1) / kGenBlock;
#pragma omp parallel for schedule(static)
        for (int64_t b = 0; b < nblocks; ++b) {
            Rng rng(derive_seed(seed, 0x10000000ULL + uint64_t(b)));
            const int64_t lo = b * kGenBlock, hi = std::min(n, lo + kGenBlock);
            for (int64_t i = lo; i < hi; ++i) {
                double t = 0.0;
                for (int j = 0; j < batch; ++j) t += sample(a.inter, rng);
                out[i] = t;
            }
        }
    } else {
        Rng rng(derive_seed(seed, 0x10000000ULL));
        ArrivalGen gen(a, rng);
        for (int64_t i = 0; i < n; ++i) {
            double t = 0.0;
            for (int j = 0; j < batch; ++j) t += gen.next();
            out[i] = t;
        }
    }
}
} // namespace

std::vector<double> replicated_response_samples(const SystemConfig& cfg,
                                                std::vector<double>* busy_out) {
    const int batch = cfg.K / cfg.k;
    const int64_t n = cfg.n_jobs;
    std::vector<double> service, inter;
    fill_services(cfg.replicas, cfg.k, n, cfg.seed, nullptr, service);
    fill_batch_inter(cfg.arrivals, batch, n, cfg.seed, inter);

    std::vector<double> wait(n);
    lindley_waits(service, inter, wait);
    std::vector<double> resp(n);
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) resp[i] = wait[i] + service[i];

    if (busy_out) {
        // purging keeps all k batch servers busy exactly while the min runs
        double busy = std::accumulate(service.begin(), service.end(), 0.0);
        double span = std::accumulate(inter.begin(), inter.end(), 0.0);
        busy_out->assign(size_t(cfg.k), span > 0.0 ? busy / span : 0.0);
    }
    return resp;
}

SimResult simulate_replicated(const SystemConfig& cfg) {
    std::vector<double> busy;
    std::vector<double> resp = replicated_response_samples(cfg, &busy);
    return summarize(std::move(resp), cfg, std::move(busy));
}

SimResult simulate_nonpurging(const SystemConfig& cfg) {
    // every batch server runs each replica to completion; response is still
    // the first finisher. Per-server FIFO workloads advance in lockstep with
    // the batch arrival stream. Same draw streams as the purging path, so
    // k=1 reproduces it sample for sample.
    const int batch = cfg.K / cfg.k;
    const int k = cfg.k;
    const int64_t n = cfg.n_jobs;

    std::vector<double> x, min_service, inter;
    fill_services(cfg.replicas, k, n, cfg.seed, &x, min_service);
    fill_batch_inter(cfg.arrivals, batch, n, cfg.seed, inter);

    std::vector<double> workload(k, 0.0), busy(k, 0.0);
    std::vector<double> resp(n);
    for (int64_t i = 0; i < n; ++i) {
        double first = std::numeric_limits<double>::infinity();
        for (int s = 0; s < k; ++s) first = std::min(first, workload[s] + x[i * k + s]);
        resp[i] = first;
        for (int s = 0; s < k; ++s) {
            busy[s] += x[i * k + s];
            workload[s] = std::max(0.0, workload[s] + x[i * k + s] - inter[i]);
        }
    }
    double span = std::accumulate(inter.begin(), inter.end(), 0.0);
    std::vector<double> busy_frac(k);
    for (int s = 0; s < k; ++s) busy_frac[s] = span > 0.0 ? busy[s] / span : 0.0;
    return summarize(std::move(resp), cfg, std::move(busy_frac));
}

} // namespace repliq
