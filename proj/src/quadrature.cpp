#include "tapered/quadrature.hpp"

#include "tapered/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tapered::quad {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

bool is_regular(double p)
{
    return p >= 0.0 && std::abs(p - std::round(p)) < 1e-12;
}

// x - a = h w^k. Negative p: k leaves w^{k(1+p)-1} with k(1+p) >= 4, which also tames
// weaker sub-leading powers. Positive fractional p: an integer k keeps the regular
// part polynomial and smooths the fractional term.
double stretch(double p)
{
    if (p < 0.0) return std::max(2.0, std::ceil(4.0 / (1.0 + p)));
    return std::min(20.0, std::max(2.0, std::ceil(2.0 / p)));
}

struct Piece {
    double value = 0.0;
    double err = 0.0;
    double l1 = 0.0;

    Piece& operator+=(const Piece& o)
    {
        value += o.value;
        err += o.err;
        l1 += o.l1;
        return *this;
    }
};

// One 61-point Kronrod rule. Boost reports the error of the rule mapped to
// [-1, 1] without rescaling, so it is multiplied by the half width here.
Piece rule(const Integrand& f, double a, double b)
{
    Piece p;
    p.value = GK::integrate(f, a, b, 0, 0.0, &p.err, &p.l1);
    p.err *= 0.5 * (b - a);
    return p;
}

Piece bisect(const Integrand& f, double a, double b, unsigned depth, double abs_tol, const Options& opt)
{
    Piece p = rule(f, a, b);
    if (depth == 0 || p.err <= abs_tol || p.err <= opt.rel_tol * std::abs(p.value)) return p;
    const double m = 0.5 * (a + b);
    if (!(m > a && m < b)) return p;
    Piece out = bisect(f, a, m, depth - 1, 0.5 * abs_tol, opt);
    out += bisect(f, m, b, depth - 1, 0.5 * abs_tol, opt);
    return out;
}

Piece raw(const Integrand& f, double a, double b, const Options& opt)
{
    if (std::isinf(a) || std::isinf(b)) {
        if (std::isinf(a) && std::isinf(b)) {
            Piece out = raw(f, a, 0.0, opt);
            out += raw(f, 0.0, b, opt);
            return out;
        }
        // x = end + dir (1 - w) / w on w in (0, 1]
        const double end = std::isinf(b) ? a : b;
        const double dir = std::isinf(b) ? 1.0 : -1.0;
        auto g = [&](double w) {
            if (w <= 0.0) return 0.0;
            const double x = end + dir * (1.0 - w) / w;
            if (!std::isfinite(x)) return 0.0;
            const double fx = f(x);
            return fx == 0.0 ? 0.0 : fx / (w * w);
        };
        return raw(g, 0.0, 1.0, opt);
    }
    const Piece first = rule(f, a, b);
    Piece p = opt.max_depth == 0
                  ? first
                  : bisect(f, a, b, opt.max_depth, opt.rel_tol * std::abs(first.value), opt);
    if (!std::isfinite(p.value)) {
        throw NumericalError("quadrature produced a non-finite value on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
    }
    return p;
}

double accept(const Piece& p, double a, double b, const Options& opt)
{
    if (p.err > opt.fail_rel * p.l1 + 1e-300) {
        throw NumericalError("quadrature did not converge on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "], error estimate " + std::to_string(p.err));
    }
    return p.value;
}

// f at distance d from an endpoint (dir = +1 for a left endpoint). Within 2^20 ulp of
// the endpoint x cannot carry the distance, so a singular f is extrapolated from
// that distance with its local power.
double near_endpoint(const Integrand& f, double end, double dir, double d, double p)
{
    const double mag = std::abs(end);
    const double dmin = mag > 0.0 ? 1048576.0 * (std::nextafter(mag, kInfinity) - mag) : 0.0;
    if (p < 0.0 && d < dmin) return f(end + dir * dmin) * std::pow(d / dmin, p);
    const double x = end + dir * d;
    if (x == end) return 0.0;
    return f(x);
}

// x = a + h w^k, w in (0, 1]
Piece left_substituted(const Integrand& f, double a, double h, double p, const Options& opt)
{
    if (is_regular(p)) return raw(f, a, a + h, opt);
    const double k = stretch(p);
    auto g = [&](double w) {
        if (w <= 0.0) return 0.0;
        return near_endpoint(f, a, 1.0, h * std::pow(w, k), p) * h * k * std::pow(w, k - 1.0);
    };
    return raw(g, 0.0, 1.0, opt);
}

// x = b - h w^k
Piece right_substituted(const Integrand& f, double b, double h, double p, const Options& opt)
{
    if (is_regular(p)) return raw(f, b - h, b, opt);
    const double k = stretch(p);
    auto g = [&](double w) {
        if (w <= 0.0) return 0.0;
        return near_endpoint(f, b, -1.0, h * std::pow(w, k), p) * h * k * std::pow(w, k - 1.0);
    };
    return raw(g, 0.0, 1.0, opt);
}

Piece singular_piece(const Integrand& f, double a, double b, double pa, double pb, const Options& opt)
{
    if (pa <= -1.0 || pb <= -1.0) throw DomainError("endpoint exponent must exceed -1");
    if (a == b) return {};
    const bool ra = is_regular(pa);
    const bool rb = is_regular(pb);
    if (ra && rb) return raw(f, a, b, opt);
    if (rb) return left_substituted(f, a, b - a, pa, opt);
    if (ra) return right_substituted(f, b, b - a, pb, opt);
    const double m = 0.5 * (a + b);
    Piece out = left_substituted(f, a, m - a, pa, opt);
    out += right_substituted(f, b, b - m, pb, opt);
    return out;
}

} // namespace

double integrate(const Integrand& f, double a, double b, const Options& opt)
{
    if (a == b) return 0.0;
    return accept(raw(f, a, b, opt), a, b, opt);
}

double integrate_singular(const Integrand& f, double a, double b, double pa, double pb,
                          const Options& opt)
{
    if (a > b) return -integrate_singular(f, b, a, pb, pa, opt);
    return accept(singular_piece(f, a, b, pa, pb, opt), a, b, opt);
}

double integrate_tail(const Integrand& f, double a, double q, const Options& opt)
{
    if (!(a > 0.0)) throw DomainError("tail integral needs a positive lower limit");
    if (!(q > 1.0)) throw DomainError("tail integral needs decay exponent above 1");
    const double k = 1.0 / (q - 1.0);
    auto g = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double x = a * std::pow(w, -k);
        if (!std::isfinite(x)) return 0.0;
        const double fx = f(x);
        return fx == 0.0 ? 0.0 : fx * x * (k / w);
    };
    return accept(raw(g, 0.0, 1.0, opt), a, kInfinity, opt);
}

double integrate_piecewise(const Integrand& f, std::vector<Break> breaks, const Options& opt)
{
    std::sort(breaks.begin(), breaks.end(), [](const Break& l, const Break& r) { return l.x < r.x; });
    std::vector<Break> merged;
    for (const Break& b : breaks) {
        if (!merged.empty() && merged.back().x == b.x) {
            double& e = merged.back().exponent;
            // a fractional power needs the substitution even if a regular break sits on top
            if (is_regular(e) || (!is_regular(b.exponent) && b.exponent < e)) e = b.exponent;
        } else {
            merged.push_back(b);
        }
    }
    breaks.swap(merged);
    // the error budget is shared across pieces, so tiny pieces at roundoff level do not fail
    Piece total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1].x > breaks[i].x) {
            total += singular_piece(f, breaks[i].x, breaks[i + 1].x, breaks[i].exponent, breaks[i + 1].exponent, opt);
        }
    }
    if (breaks.empty()) return 0.0;
    return accept(total, breaks.front().x, breaks.back().x, opt);
}

} // namespace tapered::quad
