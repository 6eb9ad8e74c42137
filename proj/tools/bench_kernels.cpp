// Timing comparison of the OpenMP kernels against their serial references.
#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "repliq/kernels.hpp"
#include "repliq/rng.hpp"

using namespace repliq;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

} // namespace

int main() {
    const size_t n = 20'000'000;
    Rng rng(42);
    std::vector<double> service(n), inter(n), wait(n);
    for (size_t i = 0; i < n; ++i) {
        service[i] = rng.exponential(1.0);
        inter[i] = rng.exponential(0.8);
    }

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-28s %12s %12s %10s\n", "kernel", "serial ms", "parallel ms", "speedup");

    auto wait_sum = [&] {
        double s = 0.0;
        for (double w : wait) s += w;
        return s;
    };
    double s0 = best_of(3, [&] { lindley_waits_serial(service, inter, wait); });
    double checksum = wait_sum();
    double p0 = best_of(3, [&] { lindley_waits(service, inter, wait); });
    std::printf("%-28s %12.1f %12.1f %9.2fx   (wait sum serial=%.10g parallel=%.10g)\n",
                "lindley_waits (2e7)", s0, p0, s0 / p0, checksum, wait_sum());

    std::vector<double> grid;
    for (int j = 0; j < 64; ++j) grid.push_back(0.25 * j);
    std::vector<int64_t> cs, cp;
    double s1 = best_of(3, [&] { cs = tail_counts_serial(wait, grid); });
    double p1 = best_of(3, [&] { cp = tail_counts(wait, grid); });
    bool same = cs == cp;
    std::printf("%-28s %12.1f %12.1f %9.2fx   (counts %s)\n", "tail_counts (2e7 x 64)", s1, p1,
                s1 / p1, same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
