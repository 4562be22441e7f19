#include "tapered/filters.hpp"

#include "tapered/errors.hpp"
#include "tapered/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tapered {

const char* to_string(Dependence d)
{
    switch (d) {
    case Dependence::LRD: return "LRD";
    case Dependence::SRD: return "SRD";
    case Dependence::ND: return "ND";
    }
    return "?";
}

const char* to_string(FilterTaper t)
{
    switch (t) {
    case FilterTaper::Strong: return "strong";
    case FilterTaper::Weak: return "weak";
    case FilterTaper::Moderate: return "moderate";
    }
    return "?";
}

double riemann_zeta(double s)
{
    if (!(s > 1.0)) throw DomainError("zeta series diverges for s <= 1, got " + std::to_string(s));
    if (std::isinf(s)) return 1.0;
    constexpr int N = 1000;
    double head = 0.0;
    for (int k = N - 1; k >= 1; --k) head += std::pow(static_cast<double>(k), -s);
    const double Nd = N;
    double tail = std::pow(Nd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Nd, -s);
    // B2/2!, B4/4!, B6/6!, B8/8!
    constexpr double coef[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
    double rising = s; // s (s+1) ... (s+2j-2)
    double power = std::pow(Nd, -s - 1.0);
    for (int j = 0; j < 4; ++j) {
        tail += coef[j] * rising * power;
        rising *= (s + 2 * j + 1) * (s + 2 * j + 2);
        power /= Nd * Nd;
    }
    return head + tail;
}

double nd_zero_sum_constant(double beta)
{
    if (!(beta > 1.0)) throw DomainError("zero-sum constant needs beta > 1 (the series diverges)");
    return -riemann_zeta(beta);
}

FilterSpec FilterSpec::lrd(double beta, double a0)
{
    if (!(beta >= 0.0 && beta < 1.0)) throw DomainError("LRD filter needs 0 <= beta < 1");
    return {beta, Dependence::LRD, a0};
}

FilterSpec FilterSpec::srd(double beta, double a0)
{
    if (!(beta > 1.0)) throw DomainError("SRD filter needs beta > 1");
    if (std::abs(a0 + riemann_zeta(beta)) < 1e-9) throw DomainError("SRD filter must not sum to zero");
    return {beta, Dependence::SRD, a0};
}

FilterSpec FilterSpec::nd(double beta)
{
    if (!(beta > 1.0)) throw DomainError("ND filter needs beta > 1");
    return {beta, Dependence::ND, nd_zero_sum_constant(beta)};
}

FilterSpec FilterSpec::constant()
{
    return {0.0, Dependence::LRD, 1.0};
}

double FilterSpec::coefficient(long i) const
{
    if (i < 0) return 0.0;
    if (i == 0) return a0_;
    return std::pow(static_cast<double>(i), -beta_);
}

double FilterSpec::total_sum() const
{
    if (dep_ == Dependence::LRD) return std::numeric_limits<double>::infinity();
    if (dep_ == Dependence::ND) return 0.0;
    return a0_ + riemann_zeta(beta_);
}

bool FilterSpec::gaussian_admissible() const
{
    switch (dep_) {
    case Dependence::LRD: return beta_ > 0.5 && beta_ < 1.0;
    case Dependence::SRD: return beta_ > 1.0;
    case Dependence::ND: return beta_ > 1.0 && beta_ < 1.5;
    }
    return false;
}

bool FilterSpec::stable_admissible(double alpha) const
{
    switch (dep_) {
    case Dependence::LRD: return beta_ > 1.0 / alpha && beta_ < 1.0;
    case Dependence::SRD: return beta_ > 1.0;
    case Dependence::ND: return beta_ > std::max(1.0, 1.0 / alpha) && beta_ < 1.0 + 1.0 / alpha;
    }
    return false;
}

FilterTaper classify_filter_taper(double gamma1)
{
    if (!(gamma1 > 0.0)) throw DomainError("filter taper exponent must be positive");
    if (gamma1 < 1.0) return FilterTaper::Strong;
    if (gamma1 > 1.0) return FilterTaper::Weak;
    return FilterTaper::Moderate;
}

long taper_lag(double gamma1, double c, long n)
{
    if (n < 1) throw DomainError("sample size must be positive");
    if (!(c > 0.0)) throw DomainError("taper scale c must be positive");
    classify_filter_taper(gamma1);
    const double v = c * std::pow(static_cast<double>(n), gamma1);
    // guard against pow landing just below an exact integer
    const double lag = std::floor(v * (1.0 + 1e-12));
    if (lag > 1e12) throw SizeError("filter lag too large: " + std::to_string(v));
    if (lag < 1.0) throw DomainError("filter lag floor(c n^gamma1) must be at least 1");
    return static_cast<long>(lag);
}

TaperedFilter::TaperedFilter(FilterSpec base, double gamma1, double c, long n)
    : base_(base), gamma1_(gamma1), c_(gamma1 == 1.0 ? c : 1.0), n_(n), lag_(taper_lag(gamma1, c_, n))
{
}

TaperedFilter TaperedFilter::with_lag(FilterSpec base, long lag, long n)
{
    if (lag < 0) throw DomainError("filter lag must be non-negative");
    if (n < 1) throw DomainError("sample size must be positive");
    return TaperedFilter(base, 1.0, static_cast<double>(lag) / static_cast<double>(n), n, lag);
}

double TaperedFilter::coefficient(long i) const
{
    if (i < 0 || i > lag_) return 0.0;
    return base_.coefficient(i);
}

std::vector<double> TaperedFilter::prefix_sums() const
{
    std::vector<double> p(static_cast<std::size_t>(lag_) + 1);
    stats::Accumulator acc;
    for (long k = 0; k <= lag_; ++k) {
        acc.add(base_.coefficient(k));
        p[static_cast<std::size_t>(k)] = acc.value();
    }
    return p;
}

double TaperedFilter::abs_sum() const
{
    stats::Accumulator acc;
    for (long k = lag_; k >= 0; --k) acc.add(std::abs(base_.coefficient(k)));
    return acc.value();
}

} // namespace tapered
