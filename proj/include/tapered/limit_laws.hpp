#pragma once

#include "tapered/rng.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tapered {

/// Replicas x time points, row-major.
struct PathMatrix {
    std::size_t replicas = 0;
    std::size_t points = 0;
    std::vector<double> values;

    PathMatrix() = default;
    PathMatrix(std::size_t r, std::size_t p) : replicas(r), points(p), values(r * p, 0.0) {}
    double& at(std::size_t r, std::size_t k) { return values[r * points + k]; }
    double at(std::size_t r, std::size_t k) const { return values[r * points + k]; }
    std::vector<double> column(std::size_t k) const;
};

// ---------------------------------------------------------------------------
// Variance constants
// ---------------------------------------------------------------------------

/// Which side of the t = c split a piecewise constant is evaluated on.
enum class Branch { Auto, Inner, Outer };

/// Constants C0..C20 of the Gaussian variance functions. Ids without t or c
/// dependence ignore those arguments. Inner/Outer force the t <= c or t > c
/// formula for the piecewise ids 9 and 16.
double constant_C(int id, double t, double beta, double c, Branch branch = Branch::Auto);

/// The increment g(y) = ((1+y)^{1-beta} - y^{1-beta}) / (1-beta).
double unit_increment(double y, double beta);

/// Hurst exponent of the Gaussian limit in case j (1..12).
double hurst_index(int j, double beta);

/// Variance function W of the Gaussian limit for cases 1..12.
double limit_variance(int j, double t, double beta, double c);

/// Variance of the constant-filter limits (cases 10, 11, 12).
double constant_filter_variance(int j, double t, double c);

enum class CovarianceSource { StationaryIncrement, KernelQuadrature, Degenerate };

struct GaussianLimit {
    int case_index;
    double beta;
    double c;
    double hurst;
    CovarianceSource source;

    double variance(double t) const;
    double covariance(double t, double s) const;
};

GaussianLimit gaussian_limit(int j, double beta, double c);

double gaussian_covariance(int j, double t, double s, double beta, double c);

/// min(t-u, c)^e on (-c, t) minus (-u)^e on (-c, 0), evaluated without cancellation.
double clipped_power_difference(double u, double t, double c, double e);

/// Kernel whose L2 products give the moderate-taper covariances (cases 7, 9, 12).
double moderate_kernel(double u, double t, double beta, double c);

/// Exact samples of the Gaussian limit on t_grid via an LDLT factor of the covariance.
PathMatrix simulate_gaussian_limit(const GaussianLimit& law, std::span<const double> t_grid,
                                   std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Stable limits
// ---------------------------------------------------------------------------

/// Scale Gamma(1-alpha) cos(pi alpha / 2) of the stable law attracting
/// standard Pareto sums normalised by n^{1/alpha}.
double pareto_stable_scale(double alpha);

struct StableLimit {
    int case_index;
    double alpha;
    double beta;
    double c;
    double filter_sum; ///< sum of filter coefficients (cases 2, 5, 8)
    double skew = 1.0; ///< +1: totally skewed to the right (positive Pareto input)
    double control = 0.0; ///< Lebesgue control density; 0 selects pareto_stable_scale(alpha)

    double control_density() const;
};

StableLimit stable_limit(int j, double alpha, double beta, double c, double filter_sum);

double stable_kernel(const StableLimit& law, double u, double t);

/// log E exp(i theta sum_l w_l U(t_l)) for an arbitrary kernel representation.
struct KernelRepresentation {
    std::function<double(double)> kernel;
    double lower;  ///< -inf allowed
    double upper;
    std::vector<double> breaks;     ///< kinks and jumps
    std::vector<double> singular;   ///< points where the kernel behaves like |u - x|^singular_exponent
    double singular_exponent = 0.0;
    double tail_decay = 0.0;        ///< kernel ~ |u|^{-tail_decay} as u -> -inf
    bool piecewise_constant = false;
};

std::complex<double> stable_integral_log_cf(const KernelRepresentation& rep, double alpha, double skew,
                                            double control, double theta);

std::complex<double> stable_log_cf(const StableLimit& law, double theta, double t);
std::complex<double> stable_log_cf(const StableLimit& law, double theta, std::span<const double> times,
                                   std::span<const double> weights);

KernelRepresentation stable_kernel_representation(const StableLimit& law, std::span<const double> times,
                                                  std::span<const double> weights);

// ---------------------------------------------------------------------------
// Tapered fractional motions of the third kind
// ---------------------------------------------------------------------------

struct TFKernel {
    double H;
    double alpha; ///< in (0, 2]
    double c;

    TFKernel(double H, double alpha, double c);
    double exponent() const { return H - 1.0 / alpha; }
    /// min(t-u, c)^e on (-c, t) minus (-u)^e on (-c, 0)
    double operator()(double t, double u) const;
    KernelRepresentation representation(std::span<const double> times, std::span<const double> weights) const;
};

/// sigma * int h(t;u) h(s;u) du for the Gaussian kernel (alpha = 2).
double tf3_covariance(double H, double c, double t, double s, double sigma);

/// sigma making the Gaussian motion with H = 3/2 - beta match W^(7) at t = 1.
double tf3_matching_sigma(double beta, double c);

/// Standard stable variate S_alpha(1, skew, 0), Chambers-Mallows-Stuck, alpha != 1.
double stable_variate(double alpha, double skew, Rng& rng);

struct Tfsm3Options {
    double skew = 1.0;
    double sigma = 1.0;  ///< control density of the random measure
    double step = 0.0;   ///< 0 selects (c + t_max) / 2^16
    unsigned threads = 1;
};

/// Riemann-sum simulation over a grid spanning [-c, t_max]; alpha = 2 uses Gaussian cells.
PathMatrix simulate_tfsm3(const TFKernel& kernel, std::span<const double> t_grid, std::size_t replicas,
                          std::uint64_t seed, const Tfsm3Options& opt = {});

} // namespace tapered
