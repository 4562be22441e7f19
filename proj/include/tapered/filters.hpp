#pragma once

#include <vector>

namespace tapered {

enum class Dependence { LRD, SRD, ND };
enum class FilterTaper { Strong, Weak, Moderate };

const char* to_string(Dependence d);
const char* to_string(FilterTaper t);

/// Riemann zeta for s > 1 (partial sum plus Euler-Maclaurin tail).
double riemann_zeta(double s);

/// a0 that makes a0 + sum_{i>=1} i^{-beta} vanish.
double nd_zero_sum_constant(double beta);

/// Coefficients a_0 and a_i = i^{-beta}, i >= 1.
class FilterSpec {
public:
    static FilterSpec lrd(double beta, double a0 = 1.0);
    static FilterSpec srd(double beta, double a0 = 1.0);
    static FilterSpec nd(double beta);
    /// a_i = 1 for all i.
    static FilterSpec constant();

    double beta() const { return beta_; }
    Dependence dependence() const { return dep_; }
    double a0() const { return a0_; }
    double coefficient(long i) const;
    /// a0 + zeta(beta); only meaningful for summable filters.
    double total_sum() const;

    /// Parameter ranges under which a Gaussian limit is attached.
    bool gaussian_admissible() const;
    /// Parameter ranges under which the stable limit with index alpha is attached.
    bool stable_admissible(double alpha) const;

private:
    FilterSpec(double beta, Dependence dep, double a0) : beta_(beta), dep_(dep), a0_(a0) {}
    double beta_;
    Dependence dep_;
    double a0_;
};

FilterTaper classify_filter_taper(double gamma1);

/// Filter truncated after lag lambda(n) = floor(c n^gamma1).
class TaperedFilter {
public:
    /// c is forced to 1 unless gamma1 == 1.
    TaperedFilter(FilterSpec base, double gamma1, double c, long n);
    /// Explicit lag, for plumbing and tests (lag 0 gives the identity filter when a0 = 1).
    static TaperedFilter with_lag(FilterSpec base, long lag, long n);

    const FilterSpec& base() const { return base_; }
    double gamma1() const { return gamma1_; }
    double c() const { return c_; }
    long n() const { return n_; }
    long lag() const { return lag_; }
    FilterTaper taper() const { return classify_filter_taper(gamma1_); }

    double coefficient(long i) const;
    /// P[k] = sum_{i<=k} coefficient(i) for k = 0..lag.
    std::vector<double> prefix_sums() const;
    /// sum_i |coefficient(i)|
    double abs_sum() const;

private:
    TaperedFilter(FilterSpec base, double gamma1, double c, long n, long lag)
        : base_(base), gamma1_(gamma1), c_(c), n_(n), lag_(lag) {}
    FilterSpec base_;
    double gamma1_;
    double c_;
    long n_;
    long lag_;
};

long taper_lag(double gamma1, double c, long n);

} // namespace tapered
