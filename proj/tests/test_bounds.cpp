#include <doctest.h>

#include <cmath>
#include <limits>

#include "repliq/bounds.hpp"
#include "repliq/errors.hpp"
#include "repliq/markov.hpp"
#include "repliq/rng.hpp"

using namespace repliq;

namespace {

ReplicationSpec ind_spec(int K, int k, double mu, double lambda) {
    return ReplicationSpec(K, k, ReplicaModel::independent(Distribution::exponential(mu)),
                           ArrivalProcess::poisson(lambda));
}

double phi_ind(const ReplicationSpec& s, double th) {
    return min_order_mgf(s.service.idio, s.k, th) *
           std::pow(laplace(s.arrivals, th), double(s.K) / s.k);
}

} // namespace

TEST_CASE("closed-form theta for M/M replication") {
    // K=k=1: theta = mu - lambda
    BoundResult b = theta_ind(ind_spec(1, 1, 1.0, 0.5));
    CHECK(b.stable);
    CHECK(b.theta == doctest::Approx(0.5).epsilon(1e-9));
    // K=k: theta = k mu - lambda
    BoundResult b4 = theta_ind(ind_spec(4, 4, 1.0, 3.0));
    CHECK(b4.theta == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b4.prefactor == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("root residual and interior point") {
    ReplicationSpec s = ind_spec(4, 1, 1.0, 3.0);
    BoundResult b = theta_ind(s);
    CHECK(std::abs(phi_ind(s, b.theta) - 1.0) < 1e-10);
    CHECK(phi_ind(s, 0.5 * b.theta) < 1.0);

    SUBCASE("correlated regimes") {
        ArrivalProcess mm = ArrivalProcess::markov_modulated(0.1, 30.0, 0.3);
        for (int k : {1, 2, 4}) {
            double mup = 0.5 * k + 0.5;
            ReplicaModel m = ReplicaModel::correlated(0.5, Distribution::exponential(mup),
                                                      Distribution::exponential(mup));
            auto phi_c = [&](const ReplicationSpec& sp, double th, bool mkv) {
                double v = mgf(sp.service.shared, 0.5 * th) *
                           min_order_mgf(sp.service.idio, sp.k, 0.5 * th);
                double arr = mkv ? std::pow(markov_transform(sp.arrivals, th).xi, 4.0 / sp.k)
                                 : std::pow(laplace(sp.arrivals, th), 4.0 / sp.k);
                return v * arr;
            };
            ReplicationSpec sc(4, k, m, ArrivalProcess::poisson(3.0));
            BoundResult bc = theta_cor(sc);
            CHECK(std::abs(phi_c(sc, bc.theta, false) - 1.0) < 1e-10);
            CHECK(phi_c(sc, 0.5 * bc.theta, false) < 1.0);
            ReplicationSpec sm(4, k, m, mm);
            BoundResult bm = theta_mkv_cor(sm);
            CHECK(std::abs(phi_c(sm, bm.theta, true) - 1.0) < 1e-10);
            CHECK(phi_c(sm, 0.5 * bm.theta, true) < 1.0);
        }
    }
}

TEST_CASE("unstable spec returns theta 0") {
    BoundResult b = theta_ind(ind_spec(1, 1, 1.0, 2.0));
    CHECK_FALSE(b.stable);
    CHECK(b.theta == 0.0);
    CHECK_THROWS_AS(bound_ccdf(b, 1.0), UnstableBound);
    CHECK_THROWS_AS(quantile(b, 0.01), UnstableBound);
}

TEST_CASE("heavy-tailed service must go through a fit") {
    ReplicationSpec s(4, 2, ReplicaModel::independent(Distribution::pareto(1.1)),
                      ArrivalProcess::poisson(1.0));
    CHECK_THROWS_AS(theta_ind(s), MgfDiverges);
    // the fitted hyperexponential gives a finite bound at the same load
    Distribution fit = fit_hyperexp_to_pareto(1.1, 8, 1.0, 1e4);
    ReplicationSpec sf(4, 2, ReplicaModel::independent(fit), ArrivalProcess::poisson(1.0));
    BoundResult b = theta_ind(sf);
    CHECK(b.stable);
    CHECK(b.theta > 0.0);
}

TEST_CASE("bound_ccdf and quantile algebra") {
    BoundResult b;
    b.stable = true;
    b.theta = 1.0;
    b.prefactor = 4.0 / 3.0;
    CHECK(bound_ccdf(b, 0.0) == doctest::Approx(1.0));
    CHECK(bound_ccdf(b, std::log(4.0 / 3.0) + std::log(100.0)) == doctest::Approx(0.01));
    double prev = 1.0;
    for (double s = 0.0; s < 20.0; s += 0.5) {
        double v = bound_ccdf(b, s);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    BoundResult b2;
    b2.stable = true;
    b2.theta = 0.5;
    b2.prefactor = 2.0;
    CHECK(quantile(b2, 0.01) == doctest::Approx(2.0 * std::log(200.0)));
    BoundResult b3;
    b3.stable = true;
    b3.theta = 1.0;
    b3.prefactor = 1.0;
    CHECK(quantile(b3, std::exp(-1.0)) == doctest::Approx(1.0));
}

TEST_CASE("markov bound") {
    ArrivalProcess mm = ArrivalProcess::markov_modulated(0.1, 30.0, 0.3);
    SUBCASE("fig 4c setting has an in-domain root with tiny residual") {
        for (int k : {1, 2, 4}) {
            ReplicationSpec s(4, k, ReplicaModel::independent(Distribution::exponential(1.0)), mm);
            BoundResult b = theta_mkv(s);
            CHECK(b.stable);
            CHECK(b.theta < 0.3);
            double phi = min_order_mgf(s.service.idio, k, b.theta) *
                         std::pow(markov_transform(mm, b.theta).xi, 4.0 / k);
            CHECK(std::abs(phi - 1.0) < 1e-10);
        }
    }
    SUBCASE("full replication gives the tightest bound") {
        auto q99 = [&](int k) {
            ReplicationSpec s(4, k, ReplicaModel::independent(Distribution::exponential(1.0)), mm);
            return quantile(theta_mkv(s), 0.01);
        };
        CHECK(q99(4) < q99(2));
        CHECK(q99(2) < q99(1));
    }
    SUBCASE("degenerate chain behaves as Poisson") {
        ArrivalProcess deg = ArrivalProcess::markov_modulated(1.0 - 1e-12, 3.0, 3.0 * (1.0 - 1e-9));
        ReplicationSpec s(4, 4, ReplicaModel::independent(Distribution::exponential(1.0)), deg);
        BoundResult b = theta_mkv(s);
        CHECK(b.theta == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("correlated bound") {
    SUBCASE("delta=0 reduces to theta_ind") {
        for (int k : {1, 2, 4}) {
            ReplicationSpec c(4, k,
                              ReplicaModel::correlated(0.0, Distribution::exponential(1.0),
                                                       Distribution::exponential(1.0)),
                              ArrivalProcess::poisson(3.0));
            ReplicationSpec i = ind_spec(4, k, 1.0, 3.0);
            CHECK(theta_cor(c).theta == doctest::Approx(theta_ind(i).theta).epsilon(1e-10));
        }
    }
    SUBCASE("delta=1 gives theta = mu - lambda for any k") {
        for (int k : {1, 2, 4}) {
            ReplicationSpec c(k, k,
                              ReplicaModel::correlated(1.0, Distribution::exponential(1.0),
                                                       Distribution::exponential(1.0)),
                              ArrivalProcess::poisson(0.6));
            CHECK(theta_cor(c).theta == doctest::Approx(0.4).epsilon(1e-9));
        }
    }
    SUBCASE("fig 4b scaling keeps every k stable, tightest at k=4") {
        auto q99 = [](int k) {
            double mup = 0.5 * k + 0.5;
            ReplicationSpec s(4, k,
                              ReplicaModel::correlated(0.5, Distribution::exponential(mup),
                                                       Distribution::exponential(mup)),
                              ArrivalProcess::poisson(3.0));
            BoundResult b = theta_cor(s);
            REQUIRE(b.stable);
            return quantile(b, 0.01);
        };
        double q1 = q99(1), q2 = q99(2), q4 = q99(4);
        CHECK(q4 < q2);
        CHECK(q2 < q1);
    }
}

TEST_CASE("markov correlated bound") {
    ArrivalProcess mm = ArrivalProcess::markov_modulated(0.1, 30.0, 0.3);
    SUBCASE("delta=0 equals theta_mkv") {
        ReplicationSpec c(4, 2,
                          ReplicaModel::correlated(0.0, Distribution::exponential(1.0),
                                                   Distribution::exponential(1.0)),
                          mm);
        ReplicationSpec i(4, 2, ReplicaModel::independent(Distribution::exponential(1.0)), mm);
        CHECK(theta_mkv_cor(c).theta == doctest::Approx(theta_mkv(i).theta).epsilon(1e-10));
    }
    SUBCASE("degenerate chain equals theta_cor") {
        ArrivalProcess deg = ArrivalProcess::markov_modulated(1.0 - 1e-12, 3.0, 3.0 * (1.0 - 1e-9));
        ReplicaModel m = ReplicaModel::correlated(0.5, Distribution::exponential(1.5),
                                                  Distribution::exponential(1.5));
        ReplicationSpec a(4, 2, m, deg);
        ReplicationSpec b(4, 2, m, ArrivalProcess::poisson(3.0));
        CHECK(theta_mkv_cor(a).theta == doctest::Approx(theta_cor(b).theta).epsilon(1e-6));
    }
}

TEST_CASE("compute_bound dispatch") {
    ArrivalProcess mm = ArrivalProcess::markov_modulated(0.1, 30.0, 0.3);
    ReplicaModel ind = ReplicaModel::independent(Distribution::exponential(1.0));
    ReplicaModel cor = ReplicaModel::correlated(0.5, Distribution::exponential(1.5),
                                                Distribution::exponential(1.5));
    CHECK(compute_bound(ReplicationSpec(4, 4, ind, ArrivalProcess::poisson(3.0))).regime == Regime::ind);
    CHECK(compute_bound(ReplicationSpec(4, 4, ind, mm)).regime == Regime::mkv);
    CHECK(compute_bound(ReplicationSpec(4, 4, cor, ArrivalProcess::poisson(3.0))).regime == Regime::cor);
    CHECK(compute_bound(ReplicationSpec(4, 4, cor, mm)).regime == Regime::mkv_cor);
}

TEST_CASE("martingale check by Monte Carlo") {
    // E[e^{theta(min service - batch interarrival)}] = 1 at the returned theta
    ReplicationSpec s = ind_spec(4, 2, 1.0, 3.0);
    BoundResult b = theta_ind(s);
    Rng rng(31337);
    const int64_t n = 1'000'000;
    double sum = 0.0, sumsq = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double v = std::min(rng.exponential(1.0), rng.exponential(1.0));
        double t = rng.exponential(3.0) + rng.exponential(3.0);
        double m = std::exp(b.theta * (v - t));
        sum += m;
        sumsq += m * m;
    }
    double mean = sum / double(n);
    double se = std::sqrt((sumsq / double(n) - mean * mean) / double(n));
    CHECK(std::abs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("mm reference formulas") {
    MmMeans m = mm_reference(0.5, 1.0);
    CHECK(m.rnd == doctest::Approx(2.0));
    CHECK(m.mm2 == doctest::Approx(4.0 / 3.0));
    CHECK(m.rep == doctest::Approx(1.0));
    // 2 / (1 - 4 rho + sqrt(1 + 8 rho)) at rho = 1/2: 2/(sqrt 5 - 1), the
    // E2/M/1 golden-ratio mean
    CHECK(m.rr == doctest::Approx(2.0 / (std::sqrt(5.0) - 1.0)));
    SUBCASE("replication is fastest across the stability region") {
        for (double rho = 0.05; rho < 1.0; rho += 0.05) {
            MmMeans v = mm_reference(rho, 1.0);
            CHECK(v.rep < v.rnd);
            CHECK(v.rep < v.rr);
            CHECK(v.rep < v.mm2);
        }
    }
    CHECK_THROWS_AS(mm_reference(1.0, 1.0), DomainError);
}

TEST_CASE("fork-join bound") {
    SUBCASE("K=1 reduces to M/M/1") {
        BoundResult b = fj_bound(1, 1.0, ArrivalProcess::poisson(0.75));
        CHECK(b.theta == doctest::Approx(0.25).epsilon(1e-9));
    }
    SUBCASE("mean of the max via the MGF derivative") {
        // d/dtheta M_max at 0 = H_4 = 25/12
        auto m_max = [](double th) {
            double v = 1.0;
            for (int i = 1; i <= 4; ++i) v *= i / (i - th);
            return v;
        };
        double h = 1e-6;
        CHECK((m_max(h) - m_max(-h)) / (2.0 * h) == doctest::Approx(25.0 / 12.0).epsilon(1e-6));
        CHECK(harmonic(4) == doctest::Approx(25.0 / 12.0));
    }
    SUBCASE("stability uses the exact harmonic sum") {
        CHECK_FALSE(fj_bound(4, 1.0, ArrivalProcess::poisson(0.49)).stable);
        CHECK(fj_bound(4, 1.0, ArrivalProcess::poisson(0.45)).stable);
    }
}

TEST_CASE("fjr bound") {
    SUBCASE("erlang service moments") {
        // Erlang(K, K mu): mean 1/mu, variance 1/(K mu^2), via M' and M'' at 0
        auto m = [](double th) { return std::pow(4.0 / (4.0 - th), 4); };
        double h = 1e-5;
        double d1 = (m(h) - m(-h)) / (2.0 * h);
        double d2 = (m(h) - 2.0 * m(0.0) + m(-h)) / (h * h);
        CHECK(d1 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d2 - d1 * d1 == doctest::Approx(0.25).epsilon(1e-4));
    }
    SUBCASE("stable up to lambda = mu") {
        CHECK(fjr_bound(8, 1.0, ArrivalProcess::poisson(0.9)).stable);
        CHECK_FALSE(fjr_bound(8, 1.0, ArrivalProcess::poisson(1.1)).stable);
    }
    SUBCASE("fjr roughly halves the fj 99th percentile") {
        for (int K : {4, 8, 16}) {
            double lam = 0.75 / harmonic(K);
            double fj = quantile(fj_bound(K, 1.0, ArrivalProcess::poisson(lam)), 0.01);
            double fjr = quantile(fjr_bound(K, 1.0, ArrivalProcess::poisson(lam)), 0.01);
            CHECK(fjr <= 0.6 * fj);
        }
    }
}

TEST_CASE("deferred usage") {
    SUBCASE("independent: u invariant in Delta") {
        for (double off : {0.0, 0.5, 2.0, std::numeric_limits<double>::infinity()}) {
            DeferredConfig c = DeferredConfig::independent(
                off, 0.75, Distribution::exponential(1.0), Distribution::exponential(1.0));
            DeferredUsage u = deferred_usage(c);
            CHECK(u.usage == doctest::Approx(0.75).epsilon(1e-12));
        }
        DeferredConfig c0 = DeferredConfig::independent(
            0.0, 0.75, Distribution::exponential(1.0), Distribution::exponential(1.0));
        DeferredUsage u0 = deferred_usage(c0);
        CHECK(u0.rho1 == doctest::Approx(0.375));
        CHECK(u0.rho2 == doctest::Approx(0.375));
    }
    SUBCASE("correlated closed form at Delta=0") {
        DeferredUsage a = deferred_usage(DeferredConfig::correlated(0.0, 0.75, 0.25, 1.0));
        CHECK(a.usage == doctest::Approx(0.9375).epsilon(1e-9));
        DeferredUsage b = deferred_usage(DeferredConfig::correlated(0.0, 0.75, 0.75, 1.0));
        CHECK(b.usage == doctest::Approx(1.3125).epsilon(1e-9));
    }
    SUBCASE("correlated closed form matches Monte Carlo of the defining expectations") {
        Rng rng(404);
        for (double delta : {0.25, 0.75, 0.3}) {
            for (double off : {0.0, 0.6, 1.2}) {
                DeferredUsage closed = deferred_usage(DeferredConfig::correlated(off, 0.75, delta, 1.0));
                const int64_t n = 2'000'000;
                double s1 = 0.0, s2 = 0.0;
                for (int64_t i = 0; i < n; ++i) {
                    double z = rng.exponential(1.0);
                    double x1 = (1.0 - delta) * rng.exponential(1.0) + delta * z;
                    double x2 = (1.0 - delta) * rng.exponential(1.0) + delta * z;
                    s1 += std::min(x1, off + x2);
                    if (x1 > off) s2 += std::min(x1 - off, x2);
                }
                CHECK(closed.rho1 == doctest::Approx(0.75 * s1 / double(n)).epsilon(0.01));
                CHECK(closed.rho2 == doctest::Approx(0.75 * s2 / double(n)).epsilon(0.01));
                CHECK(closed.usage == doctest::Approx(closed.rho1 + closed.rho2).epsilon(1e-12));
            }
        }
    }
    SUBCASE("delta=0.5 limit is finite and consistent") {
        DeferredUsage u = deferred_usage(DeferredConfig::correlated(0.8, 0.75, 0.5, 1.0));
        CHECK(u.usage == doctest::Approx(u.rho1 + u.rho2).epsilon(1e-9));
        DeferredUsage lo = deferred_usage(DeferredConfig::correlated(0.8, 0.75, 0.499, 1.0));
        DeferredUsage hi = deferred_usage(DeferredConfig::correlated(0.8, 0.75, 0.501, 1.0));
        CHECK(u.usage > std::min(lo.usage, hi.usage) - 1e-3);
        CHECK(u.usage < std::max(lo.usage, hi.usage) + 1e-3);
    }
}

TEST_CASE("deferred bound") {
    SUBCASE("Delta = inf is plain M/M/1") {
        DeferredConfig c = DeferredConfig::independent(
            std::numeric_limits<double>::infinity(), 0.75, Distribution::exponential(1.0),
            Distribution::exponential(1.0));
        BoundResult b = deferred_theta(c);
        CHECK(b.theta == doctest::Approx(0.25).epsilon(1e-9));
    }
    SUBCASE("nondecreasing in Delta (independent)") {
        double prev = 0.0;
        for (double off : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
            DeferredConfig c = DeferredConfig::independent(
                off, 0.75, Distribution::exponential(1.0), Distribution::exponential(1.0));
            double q = deferred_bound(c, 0.01);
            CHECK(q >= prev - 1e-9);
            prev = q;
        }
    }
    SUBCASE("effective MGF against the closed form") {
        // E[e^{th min(x, D+y)}] for iid Exp(mu):
        // 1 + th[(e^{(th-mu)D}-1)/(th-mu) + e^{(th-mu)D}/(2mu-th)]
        double mu = 1.0, D = 0.7, th = 0.3;
        DeferredConfig c = DeferredConfig::independent(D, 0.75, Distribution::exponential(mu),
                                                       Distribution::exponential(mu));
        double closed = 1.0 + th * ((std::exp((th - mu) * D) - 1.0) / (th - mu) +
                                    std::exp((th - mu) * D) / (2.0 * mu - th));
        CHECK(deferred_effective_mgf(c, th) == doctest::Approx(closed).epsilon(1e-8));
    }
}
