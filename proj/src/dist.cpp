#include "repliq/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "repliq/errors.hpp"
#include "repliq/quadrature.hpp"

namespace repliq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

double lgamma_arg(double x) { return std::lgamma(x); }

// e^{theta x} * s without 0 * inf: evaluated in log space
double exp_weighted(double theta, double x, double s) {
    if (s <= 0.0) return 0.0;
    double e = theta * x + std::log(s);
    return e < 700.0 ? std::exp(e) : kInf;
}

// survival(min of k iid hyperexponentials)^1 = (sum p_i e^{-mu_i x})^k expands
// into a mixture of exponentials: one phase per composition of k over the m
// phases, weight multinomial(k; n) prod p^n, rate sum n_i mu_i.
void expand_min_hyperexp(const std::vector<double>& p, const std::vector<double>& mu, int k,
                         size_t phase, int remaining, double w, double r,
                         std::vector<std::pair<double, double>>& out) {
    if (phase + 1 == p.size()) {
        double wn = w * std::pow(p[phase], remaining);
        out.emplace_back(wn, r + remaining * mu[phase]);
        return;
    }
    double binom = 1.0, pw = 1.0;
    for (int n = 0; n <= remaining; ++n) {
        expand_min_hyperexp(p, mu, k, phase + 1, remaining - n, w * binom * pw,
                            r + n * mu[phase], out);
        binom = binom * (remaining - n) / (n + 1);
        pw *= p[phase];
    }
}
} // namespace

Distribution Distribution::exponential(double rate) {
    require(rate > 0, "exponential rate must be > 0");
    Distribution d;
    d.kind = Kind::Exponential;
    d.rate = rate;
    return d;
}

Distribution Distribution::pareto(double alpha) {
    require(alpha > 0, "pareto alpha must be > 0");
    Distribution d;
    d.kind = Kind::Pareto;
    d.alpha = alpha;
    return d;
}

Distribution Distribution::weibull(double scale, double shape) {
    require(scale > 0 && shape > 0, "weibull scale/shape must be > 0");
    Distribution d;
    d.kind = Kind::Weibull;
    d.scale = scale;
    d.shape = shape;
    return d;
}

Distribution Distribution::uniform01() {
    Distribution d;
    d.kind = Kind::UniformZeroOne;
    return d;
}

Distribution Distribution::erlang(int n, double rate) {
    require(n >= 1 && rate > 0, "erlang needs n >= 1, rate > 0");
    Distribution d;
    d.kind = Kind::Erlang;
    d.n = n;
    d.rate = rate;
    return d;
}

Distribution Distribution::hyperexp(std::vector<double> weights, std::vector<double> rates) {
    require(weights.size() == rates.size() && !weights.empty(), "hyperexp needs matching weights/rates");
    double sum = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        require(weights[i] >= 0, "hyperexp weights must be >= 0");
        require(rates[i] > 0, "hyperexp rates must be > 0");
        sum += weights[i];
    }
    require(std::abs(sum - 1.0) <= 1e-12, "hyperexp weights must sum to 1");
    Distribution d;
    d.kind = Kind::HyperExponential;
    d.weights = std::move(weights);
    d.rates = std::move(rates);
    return d;
}

Distribution Distribution::deterministic(double value) {
    require(value >= 0, "deterministic value must be >= 0");
    Distribution d;
    d.kind = Kind::Deterministic;
    d.value = value;
    return d;
}

double mean(const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::Exponential: return 1.0 / d.rate;
        case Distribution::Kind::Pareto:
            return d.alpha > 1.0 ? d.alpha / (d.alpha - 1.0) : kInf;
        case Distribution::Kind::Weibull:
            return d.scale * std::exp(lgamma_arg(1.0 + 1.0 / d.shape));
        case Distribution::Kind::UniformZeroOne: return 0.5;
        case Distribution::Kind::Erlang: return d.n / d.rate;
        case Distribution::Kind::HyperExponential: {
            double m = 0.0;
            for (size_t i = 0; i < d.weights.size(); ++i) m += d.weights[i] / d.rates[i];
            return m;
        }
        case Distribution::Kind::Deterministic: return d.value;
    }
    return 0.0;
}

double variance(const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::Exponential: return 1.0 / (d.rate * d.rate);
        case Distribution::Kind::Pareto: {
            if (d.alpha <= 2.0) return kInf;
            double m = d.alpha / (d.alpha - 1.0);
            return d.alpha / (d.alpha - 2.0) - m * m;
        }
        case Distribution::Kind::Weibull: {
            double g1 = std::exp(lgamma_arg(1.0 + 1.0 / d.shape));
            double g2 = std::exp(lgamma_arg(1.0 + 2.0 / d.shape));
            return d.scale * d.scale * (g2 - g1 * g1);
        }
        case Distribution::Kind::UniformZeroOne: return 1.0 / 12.0;
        case Distribution::Kind::Erlang: return d.n / (d.rate * d.rate);
        case Distribution::Kind::HyperExponential: {
            double m1 = 0.0, m2 = 0.0;
            for (size_t i = 0; i < d.weights.size(); ++i) {
                m1 += d.weights[i] / d.rates[i];
                m2 += 2.0 * d.weights[i] / (d.rates[i] * d.rates[i]);
            }
            return m2 - m1 * m1;
        }
        case Distribution::Kind::Deterministic: return 0.0;
    }
    return 0.0;
}

double survival(const Distribution& d, double x) {
    if (x <= 0.0) return 1.0;
    switch (d.kind) {
        case Distribution::Kind::Exponential: return std::exp(-d.rate * x);
        case Distribution::Kind::Pareto: return x < 1.0 ? 1.0 : std::pow(x, -d.alpha);
        case Distribution::Kind::Weibull: return std::exp(-std::pow(x / d.scale, d.shape));
        case Distribution::Kind::UniformZeroOne: return x >= 1.0 ? 0.0 : 1.0 - x;
        case Distribution::Kind::Erlang: {
            // sum_{i<n} (rx)^i/i! e^{-rx}
            double rx = d.rate * x;
            double term = 1.0, sum = 1.0;
            for (int i = 1; i < d.n; ++i) {
                term *= rx / i;
                sum += term;
            }
            return sum * std::exp(-rx);
        }
        case Distribution::Kind::HyperExponential: {
            double s = 0.0;
            for (size_t i = 0; i < d.weights.size(); ++i)
                s += d.weights[i] * std::exp(-d.rates[i] * x);
            return s;
        }
        case Distribution::Kind::Deterministic: return x <= d.value ? 1.0 : 0.0;
    }
    return 0.0;
}

// exponential decay rate of the survival function; 0 for power/stretched tails
static double tail_rate(const Distribution& d) {
    switch (d.kind) {
        case Distribution::Kind::Exponential: return d.rate;
        case Distribution::Kind::Pareto: return 0.0;
        case Distribution::Kind::Weibull:
            if (d.shape > 1.0) return kInf;
            if (d.shape == 1.0) return 1.0 / d.scale;
            return 0.0;
        case Distribution::Kind::UniformZeroOne: return kInf;
        case Distribution::Kind::Erlang: return d.rate;
        case Distribution::Kind::HyperExponential:
            return *std::min_element(d.rates.begin(), d.rates.end());
        case Distribution::Kind::Deterministic: return kInf;
    }
    return 0.0;
}

double mgf_sup(const Distribution& d, int k) {
    double r = tail_rate(d);
    return std::isinf(r) ? kInf : k * r;
}

double mgf(const Distribution& d, double theta) {
    if (theta == 0.0) return 1.0;
    switch (d.kind) {
        case Distribution::Kind::Exponential:
            if (theta >= d.rate) throw MgfDiverges("exponential MGF needs theta < rate");
            return d.rate / (d.rate - theta);
        case Distribution::Kind::Erlang:
            if (theta >= d.rate) throw MgfDiverges("erlang MGF needs theta < rate");
            return std::pow(d.rate / (d.rate - theta), d.n);
        case Distribution::Kind::HyperExponential: {
            double s = 0.0;
            for (size_t i = 0; i < d.weights.size(); ++i) {
                if (theta >= d.rates[i]) throw MgfDiverges("hyperexp MGF needs theta < min rate");
                s += d.weights[i] * d.rates[i] / (d.rates[i] - theta);
            }
            return s;
        }
        case Distribution::Kind::Deterministic: return std::exp(theta * d.value);
        case Distribution::Kind::UniformZeroOne: return std::expm1(theta) / theta;
        case Distribution::Kind::Pareto:
            if (theta > 0.0)
                throw MgfDiverges("pareto has no finite MGF for theta > 0; fit a hyperexponential");
            break;
        case Distribution::Kind::Weibull:
            if (theta > 0.0 && d.shape < 1.0)
                throw MgfDiverges("weibull shape < 1 has no finite MGF for theta > 0");
            if (theta > 0.0 && d.shape == 1.0) {
                if (theta >= 1.0 / d.scale) throw MgfDiverges("weibull shape 1 MGF needs theta < 1/scale");
                return 1.0 / (1.0 - theta * d.scale);
            }
            break;
    }
    // generic path via 1 + theta * int e^{theta x} S(x) dx
    return 1.0 + theta * integrate_to_inf([&](double x) {
                     return exp_weighted(theta, x, survival(d, x));
                 }, 1e-9);
}

double laplace(const Distribution& d, double theta) {
    if (theta < 0.0) throw DomainError("laplace needs theta >= 0");
    if (theta == 0.0) return 1.0;
    switch (d.kind) {
        case Distribution::Kind::Exponential: return d.rate / (d.rate + theta);
        case Distribution::Kind::Erlang: return std::pow(d.rate / (d.rate + theta), d.n);
        case Distribution::Kind::HyperExponential: {
            double s = 0.0;
            for (size_t i = 0; i < d.weights.size(); ++i)
                s += d.weights[i] * d.rates[i] / (d.rates[i] + theta);
            return s;
        }
        case Distribution::Kind::Deterministic: return std::exp(-theta * d.value);
        case Distribution::Kind::UniformZeroOne: return -std::expm1(-theta) / theta;
        default: return mgf(d, -theta);
    }
}

double min_order_mgf_numeric(const Distribution& d, int k, double theta) {
    if (theta == 0.0) return 1.0;
    if (theta >= mgf_sup(d, k))
        throw MgfDiverges("min-order MGF diverges at this theta");
    return 1.0 + theta * integrate_to_inf([&](double x) {
                     return exp_weighted(theta, x, std::pow(survival(d, x), k));
                 }, 1e-9);
}

double min_order_mgf(const Distribution& d, int k, double theta) {
    if (k < 1) throw DomainError("min_order_mgf needs k >= 1");
    if (theta == 0.0) return 1.0;
    switch (d.kind) {
        case Distribution::Kind::Exponential: {
            // min of k iid Exp(mu) is Exp(k mu)
            double km = k * d.rate;
            if (theta >= km) throw MgfDiverges("min-of-exponentials MGF needs theta < k*rate");
            return km / (km - theta);
        }
        case Distribution::Kind::Deterministic: return std::exp(theta * d.value);
        case Distribution::Kind::Pareto:
            if (theta > 0.0)
                throw MgfDiverges("pareto min has no finite MGF for theta > 0; fit a hyperexponential");
            return min_order_mgf_numeric(d, k, theta);
        case Distribution::Kind::Weibull:
            if (theta > 0.0 && d.shape < 1.0)
                throw MgfDiverges("weibull shape < 1 min has no finite MGF for theta > 0");
            if (d.shape == 1.0) {
                double km = k / d.scale;
                if (theta >= km) throw MgfDiverges("min-of-exponentials MGF needs theta < k/scale");
                return km / (km - theta);
            }
            return min_order_mgf_numeric(d, k, theta);
        case Distribution::Kind::HyperExponential: {
            if (k == 1) return mgf(d, theta);
            // the min is again a mixture of exponentials; exact unless the
            // composition count blows up
            double combos = 1.0;
            const size_t m = d.weights.size();
            for (size_t i = 1; i < m; ++i) combos *= double(k + i) / double(i);
            if (combos > 20000.0) return min_order_mgf_numeric(d, k, theta);
            std::vector<std::pair<double, double>> phases;
            phases.reserve(size_t(combos) + 1);
            expand_min_hyperexp(d.weights, d.rates, k, 0, k, 1.0, 0.0, phases);
            double v = 0.0;
            for (auto [w, r] : phases) {
                if (theta >= r) throw MgfDiverges("min-of-hyperexp MGF needs theta < k*min rate");
                v += w * r / (r - theta);
            }
            return v;
        }
        default:
            if (k == 1) return mgf(d, theta);
            return min_order_mgf_numeric(d, k, theta);
    }
}

double sample(const Distribution& d, Rng& rng) {
    switch (d.kind) {
        case Distribution::Kind::Exponential: return rng.exponential(d.rate);
        case Distribution::Kind::Pareto: return std::pow(1.0 - rng.uniform(), -1.0 / d.alpha);
        case Distribution::Kind::Weibull:
            return d.scale * std::pow(-std::log1p(-rng.uniform()), 1.0 / d.shape);
        case Distribution::Kind::UniformZeroOne: return rng.uniform();
        case Distribution::Kind::Erlang: {
            double s = 0.0;
            for (int i = 0; i < d.n; ++i) s += rng.exponential(d.rate);
            return s;
        }
        case Distribution::Kind::HyperExponential: {
            double u = rng.uniform(), acc = 0.0;
            size_t phase = d.weights.size() - 1;
            for (size_t i = 0; i < d.weights.size(); ++i) {
                acc += d.weights[i];
                if (u < acc) { phase = i; break; }
            }
            return rng.exponential(d.rates[phase]);
        }
        case Distribution::Kind::Deterministic: return d.value;
    }
    return 0.0;
}

std::string format_dist(const Distribution& d) {
    std::ostringstream os;
    os.precision(17);
    switch (d.kind) {
        case Distribution::Kind::Exponential: os << "exp:rate=" << d.rate; break;
        case Distribution::Kind::Pareto: os << "pareto:alpha=" << d.alpha; break;
        case Distribution::Kind::Weibull: os << "weibull:scale=" << d.scale << ",shape=" << d.shape; break;
        case Distribution::Kind::UniformZeroOne: os << "uniform01"; break;
        case Distribution::Kind::Erlang: os << "erlang:shape=" << d.n << ",rate=" << d.rate; break;
        case Distribution::Kind::HyperExponential: {
            os << "hyperexp:p=";
            for (size_t i = 0; i < d.weights.size(); ++i) os << (i ? "," : "") << d.weights[i];
            os << ";mu=";
            for (size_t i = 0; i < d.rates.size(); ++i) os << (i ? "," : "") << d.rates[i];
            break;
        }
        case Distribution::Kind::Deterministic: os << "det:value=" << d.value; break;
    }
    return os.str();
}

namespace {

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// key=value pairs separated by , or ;
void parse_kv(const std::string& body, std::vector<std::pair<std::string, std::string>>& out) {
    std::string cur;
    for (char ch : body + ";") {
        if (ch == ';') {
            if (!cur.empty()) {
                auto eq = cur.find('=');
                if (eq == std::string::npos) throw DomainError("distribution spec: expected key=value in '" + cur + "'");
                out.emplace_back(cur.substr(0, eq), cur.substr(eq + 1));
                cur.clear();
            }
        } else {
            cur += ch;
        }
    }
}

std::string get_kv(const std::vector<std::pair<std::string, std::string>>& kv, const std::string& key) {
    for (auto& [k, v] : kv)
        if (k == key) return v;
    throw DomainError("distribution spec: missing field '" + key + "'");
}

} // namespace

Distribution parse_dist(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (name == "uniform01") return Distribution::uniform01();

    // split body at ';' boundaries only for hyperexp lists; otherwise ',' separates fields
    if (name == "hyperexp") {
        std::vector<std::pair<std::string, std::string>> kv;
        parse_kv(body, kv);
        return Distribution::hyperexp(parse_list(get_kv(kv, "p")), parse_list(get_kv(kv, "mu")));
    }
    std::vector<std::pair<std::string, std::string>> kv;
    std::string norm = body;
    std::replace(norm.begin(), norm.end(), ',', ';');
    parse_kv(norm, kv);
    if (name == "exp") return Distribution::exponential(std::stod(get_kv(kv, "rate")));
    if (name == "pareto") return Distribution::pareto(std::stod(get_kv(kv, "alpha")));
    if (name == "weibull")
        return Distribution::weibull(std::stod(get_kv(kv, "scale")), std::stod(get_kv(kv, "shape")));
    if (name == "erlang")
        return Distribution::erlang(std::stoi(get_kv(kv, "shape")), std::stod(get_kv(kv, "rate")));
    if (name == "det") return Distribution::deterministic(std::stod(get_kv(kv, "value")));
    throw DomainError("unknown distribution kind '" + name + "'");
}

// Solve A p = b by Gauss elimination with partial pivoting; m is small.
static std::vector<double> solve_linear(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int m = int(b.size());
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        if (A[col][col] == 0.0) throw FitFailed("singular collocation system");
        for (int r = col + 1; r < m; ++r) {
            double f = A[r][col] / A[col][col];
            for (int c = col; c < m; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(m);
    for (int r = m - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < m; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

Distribution fit_hyperexp_to_pareto(double alpha, int phases, double x_lo, double x_hi) {
    if (!(alpha > 1.0)) throw DomainError("fit_hyperexp_to_pareto needs alpha > 1");
    if (phases < 2) throw DomainError("fit_hyperexp_to_pareto needs >= 2 phases");
    if (!(x_lo >= 1.0 && x_lo < x_hi)) throw DomainError("fit_hyperexp_to_pareto needs 1 <= x_lo < x_hi");

    const int m = phases;
    const double q = std::pow(x_hi / x_lo, 1.0 / (m - 1));
    std::vector<double> anchors(m);
    for (int i = 0; i < m; ++i) anchors[i] = x_lo * std::pow(q, i);

    // Rate ladder: hazard alpha/a at each tail anchor. The bulk phase carries
    // the remaining weight; its rate is the first-segment secant (shallower,
    // keeps the body mass), falling back to the hazard at x_lo if the secant
    // ladder yields a negative weight.
    auto attempt = [&](double bulk_rate) -> std::vector<double> {
        std::vector<double> mus(m);
        mus[0] = bulk_rate;
        for (int i = 1; i < m; ++i) mus[i] = alpha / anchors[i];
        std::vector<std::vector<double>> A(m, std::vector<double>(m));
        std::vector<double> b(m);
        for (int c = 0; c < m; ++c) A[0][c] = 1.0;
        b[0] = 1.0;
        for (int r = 1; r < m; ++r) {
            for (int c = 0; c < m; ++c) A[r][c] = std::exp(-mus[c] * anchors[r]);
            b[r] = std::pow(anchors[r], -alpha);
        }
        std::vector<double> p = solve_linear(A, b);
        for (double w : p)
            if (!(w > 0.0)) return {};
        p.insert(p.end(), mus.begin(), mus.end()); // pack weights then rates
        return p;
    };

    std::vector<double> packed = attempt(alpha * std::log(q) / ((q - 1.0) * x_lo));
    if (packed.empty()) packed = attempt(alpha / x_lo);
    if (packed.empty()) throw FitFailed("collocation produced a nonpositive weight");

    std::vector<double> w(packed.begin(), packed.begin() + m);
    std::vector<double> mus(packed.begin() + m, packed.end());
    // exact unit mass (weights already sum to 1 up to solver round-off)
    double partial = std::accumulate(w.begin(), w.end() - 1, 0.0);
    w.back() = 1.0 - partial;
    if (!(w.back() > 0.0)) throw FitFailed("weight normalization left no mass for the last phase");

    Distribution fit = Distribution::hyperexp(w, mus);
    // contract: tail anchors reproduced within 10% (x_lo itself cannot be
    // matched: a mixture of exponentials is log-convex, which caps its value
    // at x_lo given the next anchor's target)
    for (int i = 1; i < m; ++i) {
        double rel = std::abs(survival(fit, anchors[i]) / std::pow(anchors[i], -alpha) - 1.0);
        if (rel > 0.10) throw FitFailed("fit misses a tail anchor by more than 10%");
    }
    return fit;
}

} // namespace repliq
