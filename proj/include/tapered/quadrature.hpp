#pragma once

#include <functional>
#include <vector>

namespace tapered::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double rel_tol = 1e-12;
    unsigned max_depth = 18;
    /// Throw NumericalError when the estimated error exceeds this relative bound.
    double fail_rel = 1e-7;
};

/// Adaptive Gauss-Kronrod on a finite interval.
double integrate(const Integrand& f, double a, double b, const Options& opt = {});

/// Finite interval where f(x) ~ (x-a)^pa near a and ~ (b-x)^pb near b (exponents > -1).
/// Power substitutions flatten the endpoint behaviour before integrating.
double integrate_singular(const Integrand& f, double a, double b, double pa, double pb,
                          const Options& opt = {});

/// Integral over [a, inf) for f(x) ~ x^{-q}, q > 1, with a > 0.
double integrate_tail(const Integrand& f, double a, double q, const Options& opt = {});

/// Breakpoint description for piecewise integration.
struct Break {
    double x;
    double exponent = 0.0; ///< local power behaviour of the integrand at x
};

/// Sum of integrate_singular over consecutive breakpoints (must be sorted, finite).
double integrate_piecewise(const Integrand& f, std::vector<Break> breaks, const Options& opt = {});

} // namespace tapered::quad
