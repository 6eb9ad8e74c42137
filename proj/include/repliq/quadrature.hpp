#ifndef REPLIQ_QUADRATURE_HPP
#define REPLIQ_QUADRATURE_HPP

#include <functional>

namespace repliq {

// Adaptive Gauss-Kronrod (7,15) on [a, b], bisecting panels until the local
// error estimate meets the tolerance share.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

// Integral over [0, inf) of a nonnegative, eventually decaying integrand.
// The upper end is extended by doubling until the integrand falls below
// cutoff_frac of the running peak value.
double integrate_to_inf(const std::function<double(double)>& f,
                        double rel_tol = 1e-10, double cutoff_frac = 1e-12);

} // namespace repliq

#endif
