#ifndef REPLIQ_KERNELS_HPP
#define REPLIQ_KERNELS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace repliq {

// Waiting times of a FIFO single-server queue: w[0] = 0,
// w[i+1] = max(0, w[i] + service[i] - inter[i]).
//
// The parallel version runs a blocked max-plus scan with a fixed block size,
// so its output is independent of the thread count (step maps compose as
// w -> max(c, w + s)). It differs from the serial loop only by floating-point
// association inside each block summary.
void lindley_waits_serial(std::span<const double> service, std::span<const double> inter,
                          std::span<double> wait);
void lindley_waits(std::span<const double> service, std::span<const double> inter,
                   std::span<double> wait);

// counts of samples >= grid[j] for each j; grid must be sorted ascending
std::vector<int64_t> tail_counts_serial(std::span<const double> samples,
                                        std::span<const double> grid);
std::vector<int64_t> tail_counts(std::span<const double> samples,
                                 std::span<const double> grid);

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;
};
MeanVar mean_variance(std::span<const double> samples);

// order statistic at ceil(p*n), lower index on ties; input must be sorted
double sorted_quantile(std::span<const double> sorted, double p);

// empirical P(X >= sigma); throws EmptySample
std::vector<double> empirical_ccdf(std::span<const double> samples,
                                   std::span<const double> grid);
double empirical_quantile(std::span<const double> samples, double p);

// 64 geometric points between the 10th and 99.99th percentile of the samples
std::vector<double> sigma_grid(std::span<const double> sorted, int points = 64);

} // namespace repliq

#endif
