#include "repliq/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "repliq/errors.hpp"

namespace repliq {

namespace {
// fixed so results do not depend on the thread count
constexpr size_t kBlock = 1 << 15;
} // namespace

void lindley_waits_serial(std::span<const double> service, std::span<const double> inter,
                          std::span<double> wait) {
    const size_t n = service.size();
    double w = 0.0;
    for (size_t i = 0; i < n; ++i) {
        wait[i] = w;
        w = std::max(0.0, w + service[i] - inter[i]);
    }
}

void lindley_waits(std::span<const double> service, std::span<const double> inter,
                   std::span<double> wait) {
    const size_t n = service.size();
    if (n <= kBlock) {
        lindley_waits_serial(service, inter, wait);
        return;
    }
    const size_t nblocks = (n + kBlock - 1) / kBlock;
    // each block's step map composes to w -> max(c, w + s)
    std::vector<double> c(nblocks), s(nblocks);
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < int64_t(nblocks); ++b) {
        const size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double cb = 0.0, sb = 0.0;
        for (size_t i = lo; i < hi; ++i) {
            const double a = service[i] - inter[i];
            cb = std::max(0.0, cb + a);
            sb += a;
        }
        c[b] = cb;
        s[b] = sb;
    }
    std::vector<double> w_in(nblocks);
    double w = 0.0;
    for (size_t b = 0; b < nblocks; ++b) {
        w_in[b] = w;
        w = std::max(c[b], w + s[b]);
    }
#pragma omp parallel for schedule(static)
    for (int64_t b = 0; b < int64_t(nblocks); ++b) {
        const size_t lo = b * kBlock, hi = std::min(n, lo + kBlock);
        double wb = w_in[b];
        for (size_t i = lo; i < hi; ++i) {
            wait[i] = wb;
            wb = std::max(0.0, wb + service[i] - inter[i]);
        }
    }
}

std::vector<int64_t> tail_counts_serial(std::span<const double> samples,
                                        std::span<const double> grid) {
    const size_t g = grid.size();
    // bucket by first grid point > x, then suffix-sum
    std::vector<int64_t> hist(g + 1, 0);
    for (double x : samples) {
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        ++hist[size_t(it - grid.begin())];
    }
    std::vector<int64_t> counts(g, 0);
    int64_t acc = 0;
    for (size_t j = g; j >= 1; --j) {
        acc += hist[j];
        counts[j - 1] = acc;
    }
    return counts;
}

std::vector<int64_t> tail_counts(std::span<const double> samples,
                                 std::span<const double> grid) {
    const size_t g = grid.size();
    const int64_t n = int64_t(samples.size());
    std::vector<int64_t> hist(g + 1, 0);
#pragma omp parallel
    {
        std::vector<int64_t> local(g + 1, 0);
#pragma omp for schedule(static) nowait
        for (int64_t i = 0; i < n; ++i) {
            auto it = std::upper_bound(grid.begin(), grid.end(), samples[i]);
            ++local[size_t(it - grid.begin())];
        }
#pragma omp critical
        for (size_t j = 0; j <= g; ++j) hist[j] += local[j];
    }
    // counts >= grid[j] are suffix sums of the bucket histogram
    std::vector<int64_t> counts(g, 0);
    int64_t acc = 0;
    for (size_t j = g; j >= 1; --j) {
        acc += hist[j];
        counts[j - 1] = acc;
    }
    return counts;
}

MeanVar mean_variance(std::span<const double> samples) {
    const size_t n = samples.size();
    if (n == 0) throw EmptySample("mean_variance of an empty sample");
    double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
    for (int64_t i = 0; i < int64_t(n); ++i) sum += samples[i];
    const double m = sum / n;
    double ss = 0.0;
#pragma omp parallel for reduction(+ : ss) schedule(static)
    for (int64_t i = 0; i < int64_t(n); ++i) {
        const double d = samples[i] - m;
        ss += d * d;
    }
    return {m, n > 1 ? ss / (n - 1) : 0.0};
}

double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptySample("quantile of an empty sample");
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("quantile needs p in (0,1]");
    size_t idx = size_t(std::ceil(p * double(sorted.size())));
    if (idx == 0) idx = 1;
    return sorted[std::min(idx, sorted.size()) - 1];
}

std::vector<double> empirical_ccdf(std::span<const double> samples,
                                   std::span<const double> grid) {
    if (samples.empty()) throw EmptySample("empirical_ccdf of an empty sample");
    std::vector<double> sorted_grid(grid.begin(), grid.end());
    if (!std::is_sorted(sorted_grid.begin(), sorted_grid.end()))
        std::sort(sorted_grid.begin(), sorted_grid.end());
    std::vector<int64_t> counts = tail_counts(samples, sorted_grid);
    std::vector<double> out(grid.size());
    // map back to the caller's grid order
    for (size_t j = 0; j < grid.size(); ++j) {
        size_t idx = size_t(std::lower_bound(sorted_grid.begin(), sorted_grid.end(), grid[j]) -
                            sorted_grid.begin());
        out[j] = double(counts[idx]) / double(samples.size());
    }
    return out;
}

double empirical_quantile(std::span<const double> samples, double p) {
    if (samples.empty()) throw EmptySample("empirical_quantile of an empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_quantile(sorted, p);
}

std::vector<double> sigma_grid(std::span<const double> sorted, int points) {
    if (sorted.empty()) throw EmptySample("sigma_grid of an empty sample");
    double lo = std::max(sorted_quantile(sorted, 0.10), 1e-12);
    double hi = std::max(sorted_quantile(sorted, 0.9999), lo);
    std::vector<double> g(points);
    if (hi <= lo) {
        std::fill(g.begin(), g.end(), lo);
        return g;
    }
    const double r = std::log(hi / lo) / (points - 1);
    for (int j = 0; j < points; ++j) g[j] = lo * std::exp(r * j);
    return g;
}

} // namespace repliq
