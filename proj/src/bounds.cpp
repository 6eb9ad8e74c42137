#include "repliq/bounds.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "repliq/errors.hpp"
#include "repliq/markov.hpp"
#include "repliq/quadrature.hpp"

namespace repliq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Unique positive root of Phi(theta) = 1 on (0, theta_max). Phi(0) = 1 and
// log Phi is convex with negative initial slope, so after the initial dip
// there is exactly one crossing. Geometric expansion brackets it, bisection
// narrows to relative width 1e-12. If Phi stays below 1 on the whole domain
// (possible when theta_max is a hard cap like lambda_iact rather than an MGF
// blow-up), the cap is returned with capped = true.
struct RootResult {
    double theta;
    bool capped;
};

RootResult find_root(const std::function<double(double)>& phi, double theta_max) {
    const double cap = std::isinf(theta_max) ? 1e300 : theta_max * (1.0 - 1e-12);
    double lo = std::min(1e-3, cap / 1024.0);
    while (phi(lo) > 1.0 && lo > 1e-300) lo *= 0.5;
    double hi = lo;
    bool bracketed = false;
    while (hi < cap) {
        double nxt = std::min(hi * 2.0, cap);
        if (phi(nxt) >= 1.0) {
            lo = hi;
            hi = nxt;
            bracketed = true;
            break;
        }
        hi = nxt;
    }
    if (!bracketed) {
        if (phi(cap) < 1.0) return {cap, true};
        lo = hi * 0.5;
        hi = cap;
    }
    while (hi - lo > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        if (phi(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), false};
}

BoundResult unstable(Regime regime) {
    BoundResult b;
    b.regime = regime;
    b.theta = 0.0;
    b.prefactor = 1.0;
    b.stable = false;
    return b;
}

void require_independent(const ReplicationSpec& spec, const char* who) {
    if (spec.service.kind != ReplicaModel::Kind::Independent)
        throw WrongVariant(std::string(who) + " needs independent replicas");
}

void require_correlated(const ReplicationSpec& spec, const char* who) {
    if (spec.service.kind != ReplicaModel::Kind::AdditiveCorrelated)
        throw WrongVariant(std::string(who) + " needs additively correlated replicas");
}

void require_renewal(const ReplicationSpec& spec, const char* who) {
    if (spec.arrivals.kind != ArrivalProcess::Kind::Renewal)
        throw WrongVariant(std::string(who) + " needs renewal arrivals");
}

void require_mmpp(const ReplicationSpec& spec, const char* who) {
    if (spec.arrivals.kind != ArrivalProcess::Kind::MarkovModulated)
        throw WrongVariant(std::string(who) + " needs Markov-modulated arrivals");
}

bool stable_mean_drift(const ReplicationSpec& spec) {
    // Phi'(0) = E[min service] - (K/k) E[t] < 0
    return min_mean_service(spec.service, spec.k) <
           (double(spec.K) / spec.k) * mean_interarrival(spec.arrivals);
}

// MGF sup of the correlated service product mgf(shared, d*th) * minmgf(idio, k, (1-d)*th)
double cor_theta_sup(const ReplicaModel& m, int k) {
    double sup = kInf;
    if (m.delta > 0.0) sup = std::min(sup, mgf_sup(m.shared, 1) / m.delta);
    if (m.delta < 1.0) sup = std::min(sup, mgf_sup(m.idio, k) / (1.0 - m.delta));
    return sup;
}

} // namespace

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::ind: return "ind";
        case Regime::mkv: return "mkv";
        case Regime::cor: return "cor";
        case Regime::mkv_cor: return "mkv_cor";
        case Regime::fj: return "fj";
        case Regime::fjr: return "fjr";
        case Regime::deferred: return "deferred";
    }
    return "?";
}

BoundResult theta_ind(const ReplicationSpec& spec) {
    require_renewal(spec, "theta_ind");
    require_independent(spec, "theta_ind");
    if (!stable_mean_drift(spec)) return unstable(Regime::ind);

    const Distribution& x = spec.service.idio;
    const int k = spec.k;
    const double exponent = double(spec.K) / spec.k;
    double theta_max = mgf_sup(x, k);
    if (theta_max <= 0.0)
        throw MgfDiverges("service law has no finite MGF; fit a hyperexponential first");
    auto phi = [&](double th) {
        return min_order_mgf(x, k, th) * std::pow(laplace(spec.arrivals, th), exponent);
    };
    RootResult r = find_root(phi, theta_max);
    BoundResult b;
    b.regime = Regime::ind;
    b.theta = r.theta;
    b.prefactor = min_order_mgf(x, k, r.theta);
    b.stable = true;
    if (r.capped) b.diagnostic = "theta capped at the service MGF boundary";
    return b;
}

BoundResult theta_mkv(const ReplicationSpec& spec) {
    require_mmpp(spec, "theta_mkv");
    require_independent(spec, "theta_mkv");
    if (!stable_mean_drift(spec)) return unstable(Regime::mkv);

    const Distribution& x = spec.service.idio;
    const int k = spec.k;
    const double exponent = double(spec.K) / spec.k;
    double theta_max = std::min(mgf_sup(x, k), spec.arrivals.lambda_iact);
    if (theta_max <= 0.0)
        throw MgfDiverges("service law has no finite MGF; fit a hyperexponential first");
    auto phi = [&](double th) {
        return min_order_mgf(x, k, th) * std::pow(markov_transform(spec.arrivals, th).xi, exponent);
    };
    RootResult r = find_root(phi, theta_max);
    BoundResult b;
    b.regime = Regime::mkv;
    b.theta = r.theta;
    b.prefactor = min_order_mgf(x, k, r.theta);
    b.stable = true;
    if (r.capped) b.diagnostic = "theta capped at lambda_iact (transform domain)";
    return b;
}

BoundResult theta_cor(const ReplicationSpec& spec) {
    require_renewal(spec, "theta_cor");
    require_correlated(spec, "theta_cor");
    if (!stable_mean_drift(spec)) return unstable(Regime::cor);

    const ReplicaModel& m = spec.service;
    const int k = spec.k;
    const double exponent = double(spec.K) / spec.k;
    double theta_max = cor_theta_sup(m, k);
    if (theta_max <= 0.0)
        throw MgfDiverges("service law has no finite MGF; fit a hyperexponential first");
    auto service_mgf = [&](double th) {
        double v = 1.0;
        if (m.delta > 0.0) v *= mgf(m.shared, m.delta * th);
        if (m.delta < 1.0) v *= min_order_mgf(m.idio, k, (1.0 - m.delta) * th);
        return v;
    };
    auto phi = [&](double th) {
        return service_mgf(th) * std::pow(laplace(spec.arrivals, th), exponent);
    };
    RootResult r = find_root(phi, theta_max);
    BoundResult b;
    b.regime = Regime::cor;
    b.theta = r.theta;
    b.prefactor = service_mgf(r.theta);
    b.stable = true;
    if (r.capped) b.diagnostic = "theta capped at the service MGF boundary";
    return b;
}

BoundResult theta_mkv_cor(const ReplicationSpec& spec) {
    require_mmpp(spec, "theta_mkv_cor");
    require_correlated(spec, "theta_mkv_cor");
    if (!stable_mean_drift(spec)) return unstable(Regime::mkv_cor);

    const ReplicaModel& m = spec.service;
    const int k = spec.k;
    const double exponent = double(spec.K) / spec.k;
    double theta_max = std::min(cor_theta_sup(m, k), spec.arrivals.lambda_iact);
    if (theta_max <= 0.0)
        throw MgfDiverges("service law has no finite MGF; fit a hyperexponential first");
    auto service_mgf = [&](double th) {
        double v = 1.0;
        if (m.delta > 0.0) v *= mgf(m.shared, m.delta * th);
        if (m.delta < 1.0) v *= min_order_mgf(m.idio, k, (1.0 - m.delta) * th);
        return v;
    };
    auto phi = [&](double th) {
        return service_mgf(th) * std::pow(markov_transform(spec.arrivals, th).xi, exponent);
    };
    RootResult r = find_root(phi, theta_max);
    BoundResult b;
    b.regime = Regime::mkv_cor;
    b.theta = r.theta;
    b.prefactor = service_mgf(r.theta);
    b.stable = true;
    if (r.capped) b.diagnostic = "theta capped at lambda_iact (transform domain)";
    return b;
}

BoundResult compute_bound(const ReplicationSpec& spec) {
    const bool mmpp = spec.arrivals.kind == ArrivalProcess::Kind::MarkovModulated;
    const bool cor = spec.service.kind == ReplicaModel::Kind::AdditiveCorrelated;
    if (mmpp && cor) return theta_mkv_cor(spec);
    if (mmpp) return theta_mkv(spec);
    if (cor) return theta_cor(spec);
    return theta_ind(spec);
}

double bound_ccdf(const BoundResult& b, double sigma) {
    if (!b.stable) throw UnstableBound("no bound: system is unstable");
    return std::min(1.0, b.prefactor * std::exp(-b.theta * sigma));
}

double quantile(const BoundResult& b, double eps) {
    if (!b.stable) throw UnstableBound("no quantile: system is unstable");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("quantile needs eps in (0,1)");
    return std::max(0.0, std::log(b.prefactor / eps) / b.theta);
}

MmMeans mm_reference(double rho, double mu) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("mm_reference needs rho in (0,1)");
    if (!(mu > 0.0)) throw DomainError("mm_reference needs mu > 0");
    MmMeans m;
    m.rnd = 1.0 / (mu * (1.0 - rho));
    m.rr = 2.0 / (mu * (1.0 - 4.0 * rho + std::sqrt(1.0 + 8.0 * rho)));
    m.mm2 = 1.0 / (mu * (1.0 - rho * rho));
    m.rep = 1.0 / (2.0 * mu * (1.0 - rho));
    return m;
}

double harmonic(int K) {
    double h = 0.0;
    for (int i = 1; i <= K; ++i) h += 1.0 / i;
    return h;
}

BoundResult fj_bound(int K, double mu, const ArrivalProcess& arrivals) {
    if (K < 1 || !(mu > 0.0)) throw DomainError("fj_bound needs K >= 1, mu > 0");
    if (arrivals.kind != ArrivalProcess::Kind::Renewal)
        throw WrongVariant("fj_bound needs renewal arrivals");
    // max of K iid Exp(mu) equals in law sum_{i<=K} x_i / i, so
    // M_max(theta) = prod_i i mu / (i mu - theta) and E[max] = H_K / mu
    if (!(harmonic(K) / mu < mean_interarrival(arrivals))) {
        BoundResult b = unstable(Regime::fj);
        b.diagnostic = "unstable: needs E[t] > H_K/mu = " +
                       std::to_string(harmonic(K) / mu) +
                       " (ln K approximation: " + std::to_string(std::log(double(K)) / mu) + ")";
        return b;
    }
    auto m_max = [&](double th) {
        double v = 1.0;
        for (int i = 1; i <= K; ++i) v *= i * mu / (i * mu - th);
        return v;
    };
    auto phi = [&](double th) { return m_max(th) * laplace(arrivals, th); };
    RootResult r = find_root(phi, mu);
    BoundResult b;
    b.regime = Regime::fj;
    b.theta = r.theta;
    b.prefactor = m_max(r.theta);
    b.stable = true;
    return b;
}

BoundResult fjr_bound(int K, double mu, const ArrivalProcess& arrivals) {
    if (K < 1 || !(mu > 0.0)) throw DomainError("fjr_bound needs K >= 1, mu > 0");
    if (arrivals.kind != ArrivalProcess::Kind::Renewal)
        throw WrongVariant("fjr_bound needs renewal arrivals");
    // job service is Erlang(K, K mu): mean 1/mu for every K
    if (!(1.0 / mu < mean_interarrival(arrivals))) return unstable(Regime::fjr);
    auto m_erl = [&](double th) { return std::pow(K * mu / (K * mu - th), K); };
    auto phi = [&](double th) { return m_erl(th) * laplace(arrivals, th); };
    RootResult r = find_root(phi, K * mu);
    BoundResult b;
    b.regime = Regime::fjr;
    b.theta = r.theta;
    b.prefactor = m_erl(r.theta);
    b.stable = true;
    return b;
}

DeferredConfig DeferredConfig::independent(double offset, double lambda,
                                           Distribution original, Distribution backup) {
    if (!(offset >= 0.0)) throw DomainError("deferred offset must be >= 0");
    if (!(lambda > 0.0)) throw DomainError("deferred lambda must be > 0");
    DeferredConfig c;
    c.kind = Kind::Independent;
    c.offset = offset;
    c.lambda = lambda;
    c.original = std::move(original);
    c.backup = std::move(backup);
    return c;
}

DeferredConfig DeferredConfig::correlated(double offset, double lambda, double delta, double mu) {
    if (!(offset >= 0.0)) throw DomainError("deferred offset must be >= 0");
    if (!(lambda > 0.0 && mu > 0.0)) throw DomainError("deferred rates must be > 0");
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("deferred delta must be in [0,1]");
    DeferredConfig c;
    c.kind = Kind::Correlated;
    c.offset = offset;
    c.lambda = lambda;
    c.delta = delta;
    c.mu = mu;
    c.original = Distribution::exponential(mu);
    c.backup = Distribution::exponential(mu);
    return c;
}

namespace {

// rho1 = lambda E[min(x, Delta + y)] = lambda int S_x(t) S_y(t - Delta) dt,
// rho2 = lambda E[min((x-Delta)^+, y); x > Delta] = lambda int S_x(Delta+t) S_y(t) dt
DeferredUsage usage_by_quadrature(const Distribution& x, const Distribution& y,
                                  double lambda, double offset) {
    DeferredUsage u;
    if (std::isinf(offset)) {
        u.rho1 = lambda * mean(x);
        u.rho2 = 0.0;
    } else {
        u.rho1 = lambda * integrate_to_inf([&](double t) {
                     return survival(x, t) * (t < offset ? 1.0 : survival(y, t - offset));
                 }, 1e-10);
        u.rho2 = lambda * integrate_to_inf([&](double t) {
                     return survival(x, offset + t) * survival(y, t);
                 }, 1e-10);
    }
    u.usage = u.rho1 + u.rho2;
    return u;
}

DeferredUsage usage_correlated_closed(double lambda, double mu, double delta, double offset) {
    // At delta = 1/2 the closed form has a removable singularity; evaluate the
    // two-sided limit instead.
    if (std::abs(delta - 0.5) < 1e-9) {
        DeferredUsage a = usage_correlated_closed(lambda, mu, 0.5 - 1e-6, offset);
        DeferredUsage b = usage_correlated_closed(lambda, mu, 0.5 + 1e-6, offset);
        return {0.5 * (a.rho1 + b.rho1), 0.5 * (a.rho2 + b.rho2), 0.5 * (a.usage + b.usage)};
    }
    const double lm = lambda / mu;
    const double e_idio = std::isinf(offset) ? 0.0 : std::exp(-mu * offset / (1.0 - delta));
    const double e_shared = std::isinf(offset) ? 0.0 : std::exp(-mu * offset / delta);
    DeferredUsage u;
    u.rho1 = lm * (1.0 - 0.5 * (1.0 - delta) * e_idio);
    u.rho2 = lm * (delta * delta / (2.0 * delta - 1.0) * e_shared -
                   (1.0 - delta) / (2.0 * (2.0 * delta - 1.0)) * e_idio);
    u.usage = u.rho1 + u.rho2;
    return u;
}

} // namespace

DeferredUsage deferred_usage(const DeferredConfig& cfg) {
    if (cfg.kind == DeferredConfig::Kind::Correlated) {
        if (cfg.delta == 0.0)
            return usage_by_quadrature(cfg.original, cfg.backup, cfg.lambda, cfg.offset);
        if (cfg.delta == 1.0) {
            // replica identical to the original: server 2 never does useful work
            // beyond racing an identical clock; min(x, Delta + x) = x
            DeferredUsage u;
            u.rho1 = cfg.lambda / cfg.mu;
            u.rho2 = std::isinf(cfg.offset)
                         ? 0.0
                         : cfg.lambda / cfg.mu * std::exp(-cfg.mu * cfg.offset);
            u.usage = u.rho1 + u.rho2;
            return u;
        }
        return usage_correlated_closed(cfg.lambda, cfg.mu, cfg.delta, cfg.offset);
    }
    if (cfg.original.kind == Distribution::Kind::Exponential &&
        cfg.backup.kind == Distribution::Kind::Exponential &&
        cfg.original.rate == cfg.backup.rate) {
        const double mu = cfg.original.rate;
        const double lm = cfg.lambda / mu;
        const double e = std::isinf(cfg.offset) ? 0.0 : std::exp(-mu * cfg.offset);
        return {lm - 0.5 * lm * e, 0.5 * lm * e, lm};
    }
    return usage_by_quadrature(cfg.original, cfg.backup, cfg.lambda, cfg.offset);
}

double deferred_effective_mgf(const DeferredConfig& cfg, double theta) {
    if (theta == 0.0) return 1.0;
    if (cfg.kind == DeferredConfig::Kind::Correlated && cfg.delta > 0.0) {
        // min((1-d)x + dz, Delta + (1-d)y + dz) = dz + min((1-d)x, Delta + (1-d)y):
        // the shared component factors out of the race
        const double shared_rate = cfg.mu / cfg.delta;
        if (theta >= shared_rate) throw MgfDiverges("deferred effective MGF diverges (shared part)");
        double v = shared_rate / (shared_rate - theta);
        if (cfg.delta == 1.0) return v;
        const double idio_rate = cfg.mu / (1.0 - cfg.delta);
        Distribution part = Distribution::exponential(idio_rate);
        DeferredConfig inner = DeferredConfig::independent(cfg.offset, cfg.lambda, part, part);
        return v * deferred_effective_mgf(inner, theta);
    }
    const Distribution& x = cfg.original;
    const Distribution& y = cfg.backup;
    double sup = mgf_sup(x, 1) + (std::isinf(cfg.offset) ? 0.0 : mgf_sup(y, 1));
    if (theta >= sup) throw MgfDiverges("deferred effective MGF diverges at this theta");
    if (std::isinf(cfg.offset)) return mgf(x, theta);
    return 1.0 + theta * integrate_to_inf([&](double t) {
               double s = survival(x, t) * (t < cfg.offset ? 1.0 : survival(y, t - cfg.offset));
               if (s <= 0.0) return 0.0;
               double e = theta * t + std::log(s);
               return e < 700.0 ? std::exp(e) : std::numeric_limits<double>::infinity();
           }, 1e-9);
}

BoundResult deferred_theta(const DeferredConfig& cfg) {
    // single queue at server 1 with the purged effective service
    DeferredUsage u = deferred_usage(cfg);
    BoundResult b;
    b.regime = Regime::deferred;
    if (!(u.rho1 < 1.0)) return unstable(Regime::deferred);

    double sup;
    if (cfg.kind == DeferredConfig::Kind::Correlated && cfg.delta > 0.0) {
        sup = cfg.mu / cfg.delta;
        if (cfg.delta < 1.0) {
            double idio = cfg.mu / (1.0 - cfg.delta);
            sup = std::min(sup, std::isinf(cfg.offset) ? idio : 2.0 * idio);
        }
    } else {
        sup = mgf_sup(cfg.original, 1) + (std::isinf(cfg.offset) ? 0.0 : mgf_sup(cfg.backup, 1));
    }
    if (sup <= 0.0) throw MgfDiverges("deferred service has no finite MGF");

    auto phi = [&](double th) {
        return deferred_effective_mgf(cfg, th) * cfg.lambda / (cfg.lambda + th);
    };
    RootResult r = find_root(phi, sup);
    b.theta = r.theta;
    b.prefactor = deferred_effective_mgf(cfg, r.theta);
    b.stable = true;
    if (r.capped) b.diagnostic = "theta capped at the effective-service MGF boundary";
    return b;
}

double deferred_bound(const DeferredConfig& cfg, double eps) {
    return quantile(deferred_theta(cfg), eps);
}

} // namespace repliq
