#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "repliq/csv.hpp"
#include "repliq/errors.hpp"
#include "repliq/figures.hpp"

namespace {

using namespace repliq;

constexpr const char* kDistGrammar =
    "Distribution grammar: exp:rate=R | pareto:alpha=A | weibull:scale=S,shape=A | "
    "uniform01 | erlang:shape=N,rate=R | hyperexp:p=P1,..,Pm;mu=M1,..,Mm | det:value=C";

std::string default_outdir() {
    const char* env = std::getenv("REPLIQ_OUTDIR");
    return env ? env : ".";
}

struct BoundArgs {
    std::string regime = "ind";
    int K = 1, k = 1;
    std::string service, arrivals;
    double p = 0.0, lact = 0.0, liact = 0.0;
    double delta = 0.0;
    std::string shared, idio;
    double mu = 1.0, lambda = 0.0, Delta = 0.0;
    bool Delta_inf = false;
    double eps = 0.01;
    bool curve = false;
    std::string out;
};

ArrivalProcess make_arrivals(const BoundArgs& a) {
    if (a.regime == "mkv" || a.regime == "mkv_cor")
        return ArrivalProcess::markov_modulated(a.p, a.lact, a.liact);
    if (a.arrivals.empty()) throw DomainError("missing --arrivals");
    return ArrivalProcess::renewal(parse_dist(a.arrivals));
}

int run_bound(const BoundArgs& a) {
    BoundResult b;
    if (a.regime == "ind" || a.regime == "mkv") {
        if (a.service.empty()) throw DomainError("missing --service");
        ReplicationSpec spec(a.K, a.k, ReplicaModel::independent(parse_dist(a.service)),
                             make_arrivals(a));
        b = a.regime == "ind" ? theta_ind(spec) : theta_mkv(spec);
    } else if (a.regime == "cor" || a.regime == "mkv_cor") {
        if (a.shared.empty() || a.idio.empty())
            throw DomainError("correlated regimes need --shared and --idio");
        ReplicationSpec spec(a.K, a.k,
                             ReplicaModel::correlated(a.delta, parse_dist(a.shared),
                                                      parse_dist(a.idio)),
                             make_arrivals(a));
        b = a.regime == "cor" ? theta_cor(spec) : theta_mkv_cor(spec);
    } else if (a.regime == "fj") {
        b = fj_bound(a.K, a.mu, make_arrivals(a));
    } else if (a.regime == "fjr") {
        b = fjr_bound(a.K, a.mu, make_arrivals(a));
    } else if (a.regime == "deferred") {
        double off = a.Delta_inf ? std::numeric_limits<double>::infinity() : a.Delta;
        DeferredConfig cfg =
            a.delta > 0.0 ? DeferredConfig::correlated(off, a.lambda, a.delta, a.mu)
                          : DeferredConfig::independent(off, a.lambda,
                                                        Distribution::exponential(a.mu),
                                                        Distribution::exponential(a.mu));
        b = deferred_theta(cfg);
    } else {
        throw DomainError("unknown regime '" + a.regime + "'");
    }

    CsvWriter w(a.out.empty() ? default_outdir() + "/bound.csv" : a.out);
    w.comment("regime=" + a.regime + " K=" + std::to_string(a.K) + " k=" + std::to_string(a.k));
    w.header({"regime", "K", "k", "theta", "prefactor", "stable"});
    w.row_raw(std::string(regime_name(b.regime)) + "," + std::to_string(a.K) + "," +
              std::to_string(a.k) + "," + format_double(b.theta) + "," +
              format_double(b.prefactor) + "," + (b.stable ? "1" : "0"));
    if (!b.diagnostic.empty()) w.comment(b.diagnostic);
    if (b.stable && a.curve) {
        w.row_raw("sigma,bound");
        double q = quantile(b, 1e-6);
        for (int i = 0; i <= 64; ++i) {
            double sigma = q * i / 64.0;
            w.row({sigma, bound_ccdf(b, sigma)});
        }
    }
    w.close();
    if (!b.stable) {
        std::cerr << "unstable configuration: theta = 0, no finite bound\n";
        return 1;
    }
    std::cout << "theta=" << format_double(b.theta)
              << " prefactor=" << format_double(b.prefactor)
              << " q" << format_double(100.0 * (1.0 - a.eps)) << "="
              << format_double(quantile(b, a.eps)) << "\n";
    return 0;
}

struct SimArgs {
    std::string policy = "replicated_batches";
    int K = 1, k = 1;
    std::string service, arrivals;
    double p = 0.0, lact = 0.0, liact = 0.0;
    bool mmpp = false;
    double delta = 0.0;
    std::string shared, idio;
    bool non_purging = false;
    double Delta = 0.0;
    bool Delta_inf = false;
    int64_t n_jobs = 100000;
    uint64_t seed = 1;
    double warmup = 0.01;
    int reps = 1;
    std::string out;
};

SystemConfig make_sim_config(const SimArgs& a) {
    SystemConfig cfg;
    cfg.K = a.K;
    cfg.k = a.k;
    if (a.mmpp)
        cfg.arrivals = ArrivalProcess::markov_modulated(a.p, a.lact, a.liact);
    else if (!a.arrivals.empty())
        cfg.arrivals = ArrivalProcess::renewal(parse_dist(a.arrivals));
    else
        throw DomainError("missing --arrivals (or --mmpp with --p/--lact/--liact)");
    if (!a.shared.empty() || !a.idio.empty()) {
        if (a.shared.empty() || a.idio.empty())
            throw DomainError("correlated service needs both --shared and --idio");
        cfg.replicas = ReplicaModel::correlated(a.delta, parse_dist(a.shared), parse_dist(a.idio));
    } else if (!a.service.empty()) {
        cfg.replicas = ReplicaModel::independent(parse_dist(a.service));
    } else {
        throw DomainError("missing --service");
    }
    if (a.policy == "replicated_batches") cfg.policy = Policy::replicated_batches;
    else if (a.policy == "random") cfg.policy = Policy::random_dispatch;
    else if (a.policy == "round_robin") cfg.policy = Policy::round_robin;
    else if (a.policy == "central_queue") cfg.policy = Policy::central_queue;
    else if (a.policy == "fork_join") cfg.policy = Policy::fork_join;
    else if (a.policy == "fjr") cfg.policy = Policy::fork_join_replication;
    else if (a.policy == "deferred") cfg.policy = Policy::deferred;
    else throw DomainError("unknown policy '" + a.policy + "'");
    cfg.purging = a.non_purging ? Purging::non_purging : Purging::purging;
    cfg.replication_offset = a.Delta_inf ? std::numeric_limits<double>::infinity() : a.Delta;
    cfg.fjr_delta = a.delta;
    cfg.n_jobs = a.n_jobs;
    cfg.seed = a.seed;
    cfg.warmup_fraction = a.warmup;
    return cfg;
}

int run_simulate(const SimArgs& a) {
    std::string prefix = a.out.empty() ? default_outdir() + "/sim" : a.out;
    for (int rep = 0; rep < a.reps; ++rep) {
        SystemConfig cfg = make_sim_config(a);
        cfg.seed = a.seed + uint64_t(rep);
        SimResult r = simulate(cfg);
        std::string suffix = a.reps > 1 ? "_r" + std::to_string(rep) : "";
        {
            CsvWriter w(prefix + suffix + "_ccdf.csv");
            w.comment(r.config_echo);
            w.header({"sigma", "ccdf"});
            for (size_t j = 0; j < r.sigma.size(); ++j) w.row({r.sigma[j], r.ccdf[j]});
            w.close();
        }
        {
            CsvWriter w(prefix + suffix + "_summary.csv");
            w.comment(r.config_echo);
            w.header({"mean", "var", "q50", "q90", "q95", "q99", "rho1", "rho2", "u", "seed"});
            std::string row;
            for (double v : {r.mean, r.variance, r.q50, r.q90, r.q95, r.q99, r.rho1, r.rho2,
                             r.usage})
                row += format_double(v) + ",";
            w.row_raw(row + std::to_string(r.seed));
            w.close();
        }
        std::cout << "rep " << rep << ": mean=" << format_double(r.mean)
                  << " q99=" << format_double(r.q99) << " n=" << r.count << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(repliq::kToolVersion) +
                 " - response-time tail bounds and simulation for task replication\n" +
                 kDistGrammar};
    app.require_subcommand(1);
    app.set_config("--config")
        ->description("flat key=value config file with section prefixes "
                      "(e.g. bound.K=4, simulate.service=exp:rate=1); flags override");

    BoundArgs ba;
    CLI::App* bound = app.add_subcommand("bound", "analytic tail bound (theta, prefactor)");
    bound->add_option("--regime", ba.regime, "ind|mkv|cor|mkv_cor|fj|fjr|deferred")
        ->required()
        ->check(CLI::IsMember({"ind", "mkv", "cor", "mkv_cor", "fj", "fjr", "deferred"}));
    bound->add_option("--K", ba.K, "server count");
    bound->add_option("--k", ba.k, "replication factor (divides K)");
    bound->add_option("--service", ba.service, "service distribution (ind/mkv)");
    bound->add_option("--arrivals", ba.arrivals, "interarrival distribution (renewal regimes)");
    bound->add_option("--p", ba.p, "MMPP switch probability");
    bound->add_option("--lact", ba.lact, "MMPP active rate");
    bound->add_option("--liact", ba.liact, "MMPP inactive rate");
    bound->add_option("--delta", ba.delta, "correlation degree");
    bound->add_option("--shared", ba.shared, "shared component distribution (cor regimes)");
    bound->add_option("--idio", ba.idio, "idiosyncratic component distribution (cor regimes)");
    bound->add_option("--mu", ba.mu, "task rate (fj/fjr/deferred)");
    bound->add_option("--lambda", ba.lambda, "arrival rate (deferred)");
    bound->add_option("--Delta", ba.Delta, "replication offset (deferred)");
    bound->add_flag("--Delta-inf", ba.Delta_inf, "never replicate (Delta = inf)");
    bound->add_option("--eps", ba.eps, "quantile tail mass (default 0.01)");
    bound->add_flag("--curve", ba.curve, "append a (sigma, bound) curve");
    bound->add_option("--out", ba.out, "output CSV path");

    SimArgs sa;
    CLI::App* sim = app.add_subcommand("simulate", "discrete-event / recursion simulation");
    sim->add_option("--policy", sa.policy,
                    "replicated_batches|random|round_robin|central_queue|fork_join|fjr|deferred")
        ->check(CLI::IsMember({"replicated_batches", "random", "round_robin", "central_queue",
                               "fork_join", "fjr", "deferred"}));
    sim->add_option("--K", sa.K, "server count");
    sim->add_option("--k", sa.k, "replication factor");
    sim->add_option("--service", sa.service, "task service distribution");
    sim->add_option("--arrivals", sa.arrivals, "interarrival distribution");
    sim->add_flag("--mmpp", sa.mmpp, "Markov-modulated arrivals (use --p/--lact/--liact)");
    sim->add_option("--p", sa.p, "MMPP switch probability");
    sim->add_option("--lact", sa.lact, "MMPP active rate");
    sim->add_option("--liact", sa.liact, "MMPP inactive rate");
    sim->add_option("--delta", sa.delta, "correlation degree (correlated service / fjr)");
    sim->add_option("--shared", sa.shared, "shared component distribution");
    sim->add_option("--idio", sa.idio, "idiosyncratic component distribution");
    sim->add_flag("--non-purging", sa.non_purging, "leftover replicas run to completion");
    sim->add_option("--Delta", sa.Delta, "replication offset (deferred)");
    sim->add_flag("--Delta-inf", sa.Delta_inf, "never replicate (deferred)");
    sim->add_option("--n-jobs", sa.n_jobs, "jobs to simulate");
    sim->add_option("--seed", sa.seed, "base seed (rep r uses seed + r)");
    sim->add_option("--warmup-fraction", sa.warmup, "leading fraction dropped from stats");
    sim->add_option("--reps", sa.reps, "independent repetitions");
    sim->add_option("--out", sa.out, "output path prefix");

    std::string fig_name, fig_scale = "desk", fig_outdir;
    uint64_t fig_seed = 1;
    CLI::App* fig = app.add_subcommand("figure", "reproduce a figure's data as CSV");
    fig->add_option("--name", fig_name, "fig2|fig3|fig4a|fig4b|fig4c|fig4d|fig6|fig7|fig8|fig9")
        ->required()
        ->check(CLI::IsMember(repliq::figure_names()));
    fig->add_option("--scale", fig_scale, "desk (default, <= 1e7 jobs) or full");
    fig->add_option("--outdir", fig_outdir, "output directory (default $REPLIQ_OUTDIR or .)");
    fig->add_option("--seed", fig_seed, "base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*bound) return run_bound(ba);
        if (*sim) return run_simulate(sa);
        if (*fig) {
            std::string outdir = fig_outdir.empty() ? default_outdir() : fig_outdir;
            auto scale = fig_scale == "full" ? repliq::FigureScale::full : repliq::FigureScale::desk;
            for (const std::string& f : repliq::run_figure(fig_name, scale, outdir, fig_seed))
                std::cout << f << "\n";
            return 0;
        }
    } catch (const repliq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
