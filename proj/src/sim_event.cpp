#include <cmath>
#include <deque>
#include <queue>
#include <vector>

#include "repliq/errors.hpp"
#include "repliq/sim.hpp"

namespace repliq {

namespace {

enum class EvKind { arrival, departure };

struct Ev {
    double t;
    int64_t seq; // scheduling order breaks ties
    EvKind kind;
    int server;
    uint64_t gen; // stale-departure guard

    bool operator>(const Ev& o) const {
        if (t != o.t) return t > o.t;
        return seq > o.seq;
    }
};

struct Replica {
    int64_t job;
    double service;
};

struct Server {
    std::deque<Replica> queue;
    bool busy = false;
    int64_t cur_job = -1;
    double cur_start = 0.0;
    double cur_end = 0.0;
    uint64_t gen = 0;
    double busy_time = 0.0;
};

struct EventSim {
    const SystemConfig& cfg;
    Rng rng;
    ArrivalGen arrivals;
    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> heap;
    int64_t seq = 0;
    std::vector<Server> servers;
    std::vector<double> resp;
    std::vector<double> job_arrival;
    std::vector<char> job_done;
    std::deque<Replica> central; // central_queue policy
    int64_t arrived = 0;
    int rr_next = 0;
    double now = 0.0;

    explicit EventSim(const SystemConfig& c)
        : cfg(c), rng(c.seed), arrivals(c.arrivals, rng), servers(size_t(c.K)),
          resp(size_t(c.n_jobs)), job_arrival(size_t(c.n_jobs)), job_done(size_t(c.n_jobs), 0) {}

    void push(double t, EvKind k, int server, uint64_t gen) {
        heap.push(Ev{t, seq++, k, server, gen});
    }

    void start_service(int s) {
        Server& sv = servers[s];
        while (!sv.queue.empty() && cfg.purging == Purging::purging &&
               job_done[size_t(sv.queue.front().job)])
            sv.queue.pop_front(); // lazily drop purged queue entries
        if (sv.busy || sv.queue.empty()) return;
        Replica r = sv.queue.front();
        sv.queue.pop_front();
        sv.busy = true;
        sv.cur_job = r.job;
        sv.cur_start = now;
        sv.cur_end = now + r.service;
        ++sv.gen;
        push(sv.cur_end, EvKind::departure, s, sv.gen);
    }

    void fetch_central(int s) {
        Server& sv = servers[s];
        if (sv.busy || central.empty()) return;
        Replica r = central.front();
        central.pop_front();
        sv.busy = true;
        sv.cur_job = r.job;
        sv.cur_start = now;
        sv.cur_end = now + r.service;
        ++sv.gen;
        push(sv.cur_end, EvKind::departure, s, sv.gen);
    }

    int batch_of(int64_t job) const { return int(job % int64_t(cfg.K / cfg.k)); }

    void dispatch(int64_t job) {
        switch (cfg.policy) {
            case Policy::random_dispatch: {
                int s = int(rng.uniform() * cfg.K);
                servers[s].queue.push_back({job, sample(cfg.replicas.idio, rng)});
                start_service(s);
                break;
            }
            case Policy::round_robin: {
                int s = rr_next;
                rr_next = (rr_next + 1) % cfg.K;
                servers[s].queue.push_back({job, sample(cfg.replicas.idio, rng)});
                start_service(s);
                break;
            }
            case Policy::central_queue: {
                central.push_back({job, sample(cfg.replicas.idio, rng)});
                for (int s = 0; s < cfg.K && !central.empty(); ++s) fetch_central(s);
                break;
            }
            case Policy::replicated_batches: {
                const int b = batch_of(job);
                double shared_part = 0.0, scale = 1.0;
                if (cfg.replicas.kind == ReplicaModel::Kind::AdditiveCorrelated) {
                    shared_part = cfg.replicas.delta * sample(cfg.replicas.shared, rng);
                    scale = 1.0 - cfg.replicas.delta;
                }
                for (int j = 0; j < cfg.k; ++j) {
                    int s = b * cfg.k + j;
                    double x = shared_part + scale * sample(cfg.replicas.idio, rng);
                    servers[s].queue.push_back({job, x});
                    start_service(s);
                }
                break;
            }
            default:
                throw DomainError("event engine: unsupported policy");
        }
    }

    void purge_siblings(int64_t job, int completing_server) {
        const int b = batch_of(job);
        for (int j = 0; j < cfg.k; ++j) {
            int s = b * cfg.k + j;
            if (s == completing_server) continue;
            Server& sv = servers[s];
            for (auto it = sv.queue.begin(); it != sv.queue.end();)
                it = it->job == job ? sv.queue.erase(it) : std::next(it);
            if (sv.busy && sv.cur_job == job) {
                sv.busy_time += now - sv.cur_start;
                sv.busy = false;
                sv.cur_job = -1;
                ++sv.gen; // invalidates the scheduled departure
                start_service(s);
            }
        }
    }

    void on_departure(int s) {
        Server& sv = servers[s];
        sv.busy_time += now - sv.cur_start;
        sv.busy = false;
        int64_t job = sv.cur_job;
        sv.cur_job = -1;
        if (!job_done[size_t(job)]) {
            job_done[size_t(job)] = 1;
            resp[size_t(job)] = now - job_arrival[size_t(job)];
            if (cfg.policy == Policy::replicated_batches && cfg.purging == Purging::purging)
                purge_siblings(job, s);
        }
        if (cfg.policy == Policy::central_queue)
            fetch_central(s);
        else
            start_service(s);
    }

    void run() {
        push(arrivals.next(), EvKind::arrival, -1, 0);
        while (!heap.empty()) {
            Ev ev = heap.top();
            heap.pop();
            if (ev.kind == EvKind::departure && ev.gen != servers[size_t(ev.server)].gen)
                continue; // cancelled by purging
            now = ev.t;
            if (ev.kind == EvKind::arrival) {
                int64_t job = arrived++;
                job_arrival[size_t(job)] = now;
                dispatch(job);
                if (arrived < cfg.n_jobs) push(now + arrivals.next(), EvKind::arrival, -1, 0);
            } else {
                on_departure(ev.server);
            }
        }
    }

    SimResult finish() {
        run();
        std::vector<double> busy(servers.size());
        for (size_t s = 0; s < servers.size(); ++s)
            busy[s] = now > 0.0 ? servers[s].busy_time / now : 0.0;
        return summarize(std::move(resp), cfg, std::move(busy));
    }
};

} // namespace

SimResult simulate_policies(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.k != 1)
        throw DomainError("random/round_robin/central_queue dispatch one copy per job (k=1)");
    EventSim sim(cfg);
    return sim.finish();
}

SimResult simulate_replicated_event_driven(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.policy != Policy::replicated_batches)
        throw DomainError("event-driven path covers replicated_batches only");
    EventSim sim(cfg);
    return sim.finish();
}

std::vector<double> replicated_event_driven_samples(const SystemConfig& cfg) {
    cfg.validate();
    if (cfg.policy != Policy::replicated_batches)
        throw DomainError("event-driven path covers replicated_batches only");
    EventSim sim(cfg);
    sim.run();
    return std::move(sim.resp);
}

} // namespace repliq
