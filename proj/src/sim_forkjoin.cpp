#include <algorithm>
#include <cmath>
#include <numeric>

#include "repliq/errors.hpp"
#include "repliq/kernels.hpp"
#include "repliq/sim.hpp"

namespace repliq {

namespace {
constexpr int64_t kGenBlock = 1 << 12;

// blocking fork-join reduces to a single queue: job service = max of K tasks
void fill_fj_service(const Distribution& task, int K, int64_t n, uint64_t seed,
                     std::vector<double>& out) {
    out.resize(n);
    const int64_t nblocks = (n + kGenBlock - 1) / kGenBlock;
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < nblocks; ++b) {
        Rng rng(derive_seed(seed, uint64_t(b)));
        const int64_t lo = b * kGenBlock, hi = std::min(n, lo + kGenBlock);
        for (int64_t i = lo; i < hi; ++i) {
            double mx = 0.0;
            for (int j = 0; j < K; ++j) mx = std::max(mx, sample(task, rng));
            out[i] = mx;
        }
    }
}

void fill_inter(const ArrivalProcess& a, int64_t n, uint64_t seed, std::vector<double>& out) {
    out.resize(n);
    if (a.kind == ArrivalProcess::Kind::Renewal) {
        const int64_t nblocks = (n + kGenBlock - 1) / kGenBlock;
#pragma omp parallel for schedule(static)
        for (int64_t b = 0; b < nblocks; ++b) {
            Rng rng(derive_seed(seed, 0x10000000ULL + uint64_t(b)));
            const int64_t lo = b * kGenBlock, hi = std::min(n, lo + kGenBlock);
            for (int64_t i = lo; i < hi; ++i) out[i] = sample(a.inter, rng);
        }
    } else {
        Rng rng(derive_seed(seed, 0x10000000ULL));
        ArrivalGen gen(a, rng);
        for (int64_t i = 0; i < n; ++i) out[i] = gen.next();
    }
}

// One FJR job: K originals start together, one per server. A finished or
// purged server immediately replicates a uniformly chosen still-running task
// (freed servers re-assign in index order). Any copy of task tau serves
// (1-delta) * fresh Exp(mu) + delta * shared(tau). Returns the makespan.
double fjr_one_job(int K, double mu, double delta, Rng& rng,
                   std::vector<double>& shared, std::vector<double>& end_time,
                   std::vector<int>& serving, std::vector<int64_t>& running) {
    shared.resize(K);
    end_time.assign(K, 0.0);
    serving.assign(K, 0);
    for (int t = 0; t < K; ++t) shared[t] = delta > 0.0 ? rng.exponential(mu) : 0.0;

    auto copy_service = [&](int task) {
        return (1.0 - delta) * rng.exponential(mu) + delta * shared[task];
    };
    for (int s = 0; s < K; ++s) {
        serving[s] = s;
        end_time[s] = copy_service(s);
    }
    running.assign(K, 0);
    for (int t = 0; t < K; ++t) running[t] = t;
    int remaining = K;
    double now = 0.0;

    while (remaining > 0) {
        int win = 0;
        for (int s = 1; s < K; ++s)
            if (serving[s] >= 0 && (serving[win] < 0 || end_time[s] < end_time[win])) win = s;
        now = end_time[win];
        const int done_task = serving[win];
        // purge every copy of the finished task
        std::vector<int> freed;
        for (int s = 0; s < K; ++s)
            if (serving[s] == done_task) {
                serving[s] = -1;
                freed.push_back(s);
            }
        for (size_t r = 0; r < running.size(); ++r)
            if (running[r] == done_task) {
                running.erase(running.begin() + int64_t(r));
                break;
            }
        --remaining;
        if (remaining == 0) break;
        // freed servers pick replica targets in server-index order
        for (int s : freed) {
            int64_t pick = int64_t(rng.uniform() * double(running.size()));
            if (pick == int64_t(running.size())) --pick;
            int task = int(running[size_t(pick)]);
            serving[s] = task;
            end_time[s] = now + copy_service(task);
        }
        // purging keeps every server working while tasks remain
        for (int s = 0; s < K; ++s)
            if (serving[s] < 0) throw Error("fjr: idle server while tasks remain");
    }
    return now;
}

} // namespace

std::vector<double> fjr_job_service_samples(int K, double mu, double delta,
                                            int64_t n, uint64_t seed) {
    std::vector<double> out(n);
    const int64_t nblocks = (n + kGenBlock - 1) / kGenBlock;
#pragma omp parallel
    {
        std::vector<double> shared, end_time;
        std::vector<int> serving;
        std::vector<int64_t> running;
#pragma omp for schedule(static)
        for (int64_t b = 0; b < nblocks; ++b) {
            Rng rng(derive_seed(seed, uint64_t(b)));
            const int64_t lo = b * kGenBlock, hi = std::min(n, lo + kGenBlock);
            for (int64_t i = lo; i < hi; ++i)
                out[i] = fjr_one_job(K, mu, delta, rng, shared, end_time, serving, running);
        }
    }
    return out;
}

SimResult simulate_fork_join(const SystemConfig& cfg) {
    cfg.validate();
    std::vector<double> service, inter;
    fill_fj_service(cfg.replicas.idio, cfg.K, cfg.n_jobs, cfg.seed, service);
    fill_inter(cfg.arrivals, cfg.n_jobs, cfg.seed, inter);
    std::vector<double> wait(cfg.n_jobs);
    lindley_waits(service, inter, wait);
    std::vector<double> resp(cfg.n_jobs);
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < cfg.n_jobs; ++i) resp[i] = wait[i] + service[i];
    double busy = std::accumulate(service.begin(), service.end(), 0.0);
    double span = std::accumulate(inter.begin(), inter.end(), 0.0);
    return summarize(std::move(resp), cfg,
                     std::vector<double>(1, span > 0.0 ? busy / span : 0.0));
}

SimResult simulate_fjr(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.replicas.idio.kind != Distribution::Kind::Exponential)
        throw DomainError("fjr needs exponential task service");
    const double mu = cfg.replicas.idio.rate;
    std::vector<double> service = fjr_job_service_samples(cfg.K, mu, cfg.fjr_delta,
                                                          cfg.n_jobs, cfg.seed);
    std::vector<double> inter;
    fill_inter(cfg.arrivals, cfg.n_jobs, cfg.seed, inter);
    std::vector<double> wait(cfg.n_jobs);
    lindley_waits(service, inter, wait);
    std::vector<double> resp(cfg.n_jobs);
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < cfg.n_jobs; ++i) resp[i] = wait[i] + service[i];
    double busy = std::accumulate(service.begin(), service.end(), 0.0);
    double span = std::accumulate(inter.begin(), inter.end(), 0.0);
    return summarize(std::move(resp), cfg,
                     std::vector<double>(1, span > 0.0 ? busy / span : 0.0));
}

} // namespace repliq
