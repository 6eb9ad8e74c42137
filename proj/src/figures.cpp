#include "repliq/figures.hpp"

#include <cmath>
#include <limits>

#include "repliq/csv.hpp"
#include "repliq/errors.hpp"

namespace repliq {

namespace {

const double kFig4Lambda = 4.0 * 0.75;              // Poisson rate, Fig. 3/4
const ArrivalProcess kFig4Mmpp = ArrivalProcess::markov_modulated(0.1, 30.0, 0.3);

ReplicaModel fig4_service(char panel, int k) {
    switch (panel) {
        case 'a':
        case 'c':
            return ReplicaModel::independent(Distribution::exponential(1.0));
        case 'b':
        case 'd': {
            // correlated components scaled so the utilization stays 0.75:
            // mu' = delta k + (1 - delta) makes E[min of k] = 1/k
            const double delta = 0.5;
            const double mup = delta * k + (1.0 - delta);
            return ReplicaModel::correlated(delta, Distribution::exponential(mup),
                                            Distribution::exponential(mup));
        }
        default: throw DomainError("fig4 panel must be a..d");
    }
}

ArrivalProcess fig4_arrivals(char panel) {
    return (panel == 'a' || panel == 'b') ? ArrivalProcess::poisson(kFig4Lambda) : kFig4Mmpp;
}

} // namespace

ReplicationSpec fig4_spec(char panel, int k) {
    return ReplicationSpec(4, k, fig4_service(panel, k), fig4_arrivals(panel));
}

BoundResult fig4_bound(char panel, int k) {
    return compute_bound(fig4_spec(panel, k));
}

SystemConfig fig4_sim_config(char panel, int k, int64_t n_jobs, uint64_t seed) {
    SystemConfig cfg;
    cfg.K = 4;
    cfg.k = k;
    cfg.arrivals = fig4_arrivals(panel);
    cfg.replicas = fig4_service(panel, k);
    cfg.policy = Policy::replicated_batches;
    cfg.n_jobs = n_jobs;
    cfg.seed = seed;
    return cfg;
}

double fig6_lambda(int K, double mu) { return 0.75 * mu / harmonic(K); }

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty()) return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

std::vector<std::string> fig2(FigureScale, const std::string& outdir, uint64_t seed) {
    // overload (k=1) -> underload (k=2) -> overload (k=4); traces keep the
    // empty-start transient, so no warmup discard
    std::vector<std::string> written;
    for (int k : {1, 2, 4}) {
        SystemConfig cfg;
        cfg.K = 4;
        cfg.k = k;
        cfg.arrivals = ArrivalProcess::poisson(1.0);
        cfg.replicas = ReplicaModel::independent(Distribution::pareto(1.1));
        cfg.n_jobs = 10000;
        cfg.seed = seed;
        cfg.warmup_fraction = 0.0;
        std::vector<double> resp = replicated_response_samples(cfg);
        ReplicationSpec spec(4, k, cfg.replicas, cfg.arrivals);
        std::string path = join_path(outdir, "fig2_k" + std::to_string(k) + ".csv");
        CsvWriter w(path);
        w.comment(config_echo_string(cfg));
        w.comment("utilization=" + format_double(utilization(spec)));
        w.header({"job", "response"});
        for (size_t i = 0; i < resp.size(); ++i) w.row({double(i + 1), resp[i]});
        w.close();
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> fig3(FigureScale, const std::string& outdir, uint64_t) {
    // 99th-percentile bound vs correlation degree; components Exp(1), so the
    // replicated systems lose stability as delta grows
    std::vector<std::string> written;
    for (int k : {1, 2, 4}) {
        std::string path = join_path(outdir, "fig3_k" + std::to_string(k) + ".csv");
        CsvWriter w(path);
        w.comment("lambda=3 mu=1 K=4 k=" + std::to_string(k) + " eps=0.01");
        w.header({"delta", "q99"});
        for (int i = 0; i <= 50; ++i) {
            double delta = i / 50.0;
            ReplicaModel m = ReplicaModel::correlated(delta, Distribution::exponential(1.0),
                                                      Distribution::exponential(1.0));
            ReplicationSpec spec(4, k, m, ArrivalProcess::poisson(kFig4Lambda));
            BoundResult b = theta_cor(spec);
            w.row({delta, b.stable ? quantile(b, 0.01)
                                   : std::numeric_limits<double>::infinity()});
        }
        w.close();
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> fig4(char panel, FigureScale scale, const std::string& outdir,
                              uint64_t seed) {
    const int64_t n = scale == FigureScale::desk ? 1000000 : 1000000000;
    std::vector<std::string> written;
    for (int k : {1, 2, 4}) {
        BoundResult b = fig4_bound(panel, k);
        SystemConfig cfg = fig4_sim_config(panel, k, n, seed);
        SimResult sim = simulate(cfg);

        std::string tag = std::string("fig4") + panel + "_k" + std::to_string(k);
        std::string sim_path = join_path(outdir, tag + "_sim.csv");
        {
            CsvWriter w(sim_path);
            w.comment(sim.config_echo);
            w.header({"sigma", "ccdf"});
            for (size_t j = 0; j < sim.sigma.size(); ++j) w.row({sim.sigma[j], sim.ccdf[j]});
            w.close();
        }
        std::string bound_path = join_path(outdir, tag + "_bound.csv");
        {
            CsvWriter w(bound_path);
            w.comment(std::string("regime=") + regime_name(b.regime) +
                      " theta=" + format_double(b.theta) +
                      " prefactor=" + format_double(b.prefactor));
            w.header({"sigma", "bound"});
            for (size_t j = 0; j < sim.sigma.size(); ++j)
                w.row({sim.sigma[j], bound_ccdf(b, sim.sigma[j])});
            w.close();
        }
        written.push_back(sim_path);
        written.push_back(bound_path);
    }
    return written;
}

std::vector<std::string> fig6(FigureScale, const std::string& outdir, uint64_t) {
    std::string path = join_path(outdir, "fig6.csv");
    CsvWriter w(path);
    w.comment("mu=1, lambda_K = 0.75/H_K (FJ utilization 0.75 for every K), eps=0.01");
    w.header({"K", "q99_fj", "q99_fjr"});
    for (int K : {1, 2, 4, 8, 16}) {
        ArrivalProcess a = ArrivalProcess::poisson(fig6_lambda(K));
        w.row({double(K), quantile(fj_bound(K, 1.0, a), 0.01),
               quantile(fjr_bound(K, 1.0, a), 0.01)});
    }
    w.close();
    return {path};
}

std::vector<std::string> fig7(FigureScale scale, const std::string& outdir, uint64_t seed) {
    // FJR converges to FJ as delta -> 1; common arrival rate with FJ
    // utilization 0.9 (lambda = 0.9 / H_4)
    const int K = 4;
    const double lambda = 0.9 / harmonic(K);
    const int64_t n = scale == FigureScale::desk ? 1000000 : 100000000;
    std::vector<std::string> written;

    SystemConfig fj;
    fj.K = K;
    fj.arrivals = ArrivalProcess::poisson(lambda);
    fj.replicas = ReplicaModel::independent(Distribution::exponential(1.0));
    fj.policy = Policy::fork_join;
    fj.n_jobs = n;
    fj.seed = seed;
    SimResult fj_res = simulate(fj);
    {
        std::string path = join_path(outdir, "fig7_fj.csv");
        CsvWriter w(path);
        w.comment(fj_res.config_echo);
        w.header({"sigma", "ccdf"});
        for (size_t j = 0; j < fj_res.sigma.size(); ++j) w.row({fj_res.sigma[j], fj_res.ccdf[j]});
        w.close();
        written.push_back(path);
    }
    for (double delta : {0.0, 0.5, 1.0}) {
        SystemConfig cfg = fj;
        cfg.policy = Policy::fork_join_replication;
        cfg.fjr_delta = delta;
        SimResult res = simulate(cfg);
        std::string path = join_path(outdir, "fig7_fjr_delta" + format_double(delta) + ".csv");
        CsvWriter w(path);
        w.comment(res.config_echo);
        w.header({"sigma", "ccdf"});
        for (size_t j = 0; j < res.sigma.size(); ++j) w.row({res.sigma[j], res.ccdf[j]});
        w.close();
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> fig8(FigureScale, const std::string& outdir, uint64_t) {
    // top percentiles of the response-time bound vs replication offset
    std::vector<std::string> written;
    for (double delta : {0.25, 0.75}) {
        std::string path = join_path(outdir, "fig8_delta" + format_double(delta) + ".csv");
        CsvWriter w(path);
        w.comment("lambda=0.75 mu=1 correlated deferred replication");
        w.header({"Delta", "q90", "q95", "q99"});
        for (int i = 0; i <= 60; ++i) {
            double off = i / 20.0;
            DeferredConfig cfg = DeferredConfig::correlated(off, 0.75, delta, 1.0);
            w.row({off, deferred_bound(cfg, 0.10), deferred_bound(cfg, 0.05),
                   deferred_bound(cfg, 0.01)});
        }
        DeferredConfig inf_cfg = DeferredConfig::correlated(
            std::numeric_limits<double>::infinity(), 0.75, delta, 1.0);
        w.row({std::numeric_limits<double>::infinity(), deferred_bound(inf_cfg, 0.10),
               deferred_bound(inf_cfg, 0.05), deferred_bound(inf_cfg, 0.01)});
        w.close();
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> fig9(FigureScale, const std::string& outdir, uint64_t) {
    std::vector<std::string> written;
    for (double delta : {0.25, 0.75}) {
        std::string path = join_path(outdir, "fig9_delta" + format_double(delta) + ".csv");
        CsvWriter w(path);
        w.comment("lambda=0.75 mu=1 resource usage vs replication offset");
        w.header({"Delta", "u", "rho1", "rho2"});
        for (int i = 0; i <= 60; ++i) {
            double off = i / 20.0;
            DeferredUsage u = deferred_usage(DeferredConfig::correlated(off, 0.75, delta, 1.0));
            w.row({off, u.usage, u.rho1, u.rho2});
        }
        w.close();
        written.push_back(path);
    }
    return written;
}

} // namespace

std::vector<std::string> figure_names() {
    return {"fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig4d", "fig6", "fig7", "fig8", "fig9"};
}

std::vector<std::string> run_figure(const std::string& name, FigureScale scale,
                                    const std::string& outdir, uint64_t seed) {
    if (name == "fig2") return fig2(scale, outdir, seed);
    if (name == "fig3") return fig3(scale, outdir, seed);
    if (name == "fig4a") return fig4('a', scale, outdir, seed);
    if (name == "fig4b") return fig4('b', scale, outdir, seed);
    if (name == "fig4c") return fig4('c', scale, outdir, seed);
    if (name == "fig4d") return fig4('d', scale, outdir, seed);
    if (name == "fig6") return fig6(scale, outdir, seed);
    if (name == "fig7") return fig7(scale, outdir, seed);
    if (name == "fig8") return fig8(scale, outdir, seed);
    if (name == "fig9") return fig9(scale, outdir, seed);
    throw DomainError("unknown figure '" + name + "'");
}

} // namespace repliq
