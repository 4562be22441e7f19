#include "tapered/limit_laws.hpp"

#include "tapered/errors.hpp"
#include "tapered/parallel.hpp"
#include "tapered/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tapered {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_beta_constant(int id, double beta)
{
    const bool wide = id == 3 || id == 5 || id == 6 || id == 7 || id == 12 || id == 14 || id == 15;
    const bool ok = wide ? (beta >= 0.0 && beta < 1.5 && beta != 1.0)
                         : (beta > 0.5 && beta < 1.5 && beta != 1.0);
    if (!ok) {
        throw DomainError("constant C" + std::to_string(id) + " is undefined for beta = " + std::to_string(beta));
    }
}

void require_positive(const char* name, double v)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(v));
    }
}

// (x + a)^e - x^e without cancellation for x >> a
double power_increment(double x, double a, double e)
{
    if (x <= 0.0) return std::pow(a, e) - (x == 0.0 ? (e > 0.0 ? 0.0 : kInf) : 0.0);
    return std::pow(x, e) * std::expm1(e * std::log1p(a / x));
}

double singular_exponent(double e, double power)
{
    // local power of |kernel|^power at a point where the kernel ~ |u|^e (+ smooth)
    return e < 0.0 ? power * e : e;
}

double c0(double beta)
{
    const double e = 1.0 - beta;
    auto f = [&](double y) {
        const double g = unit_increment(y, beta);
        return g * g;
    };
    return quad::integrate_singular(f, 0.0, 1.0, singular_exponent(e, 2.0), 0.0) +
           quad::integrate_tail(f, 1.0, 2.0 * beta);
}

double c1(double z, double beta)
{
    const double upper = z - 1.0;
    if (upper < -1e-12) throw DomainError("C1 is defined for t <= c only");
    if (upper <= 0.0) return 0.0;
    const double e = 1.0 - beta;
    auto f = [&](double y) {
        const double g = unit_increment(y, beta);
        return g * g;
    };
    if (upper <= 2.0) return quad::integrate_singular(f, 0.0, upper, singular_exponent(e, 2.0), 0.0);
    return c0(beta) - quad::integrate_tail(f, upper, 2.0 * beta);
}

double c2(double z, double beta)
{
    // integral of ((z^e - y^e)/e)^2 over [max(0, z-1), z]
    const double e = 1.0 - beta;
    const double lo = std::max(0.0, z - 1.0);
    if (lo <= 0.5 * z) {
        const double ze = std::pow(z, e);
        const double le = lo > 0.0 ? std::pow(lo, e) : 0.0;
        const double v = ze * ze * (z - lo) - 2.0 * ze * (z * ze - lo * le) / (e + 1.0) +
                         (z * ze * ze - lo * le * le) / (2.0 * e + 1.0);
        return v / (e * e);
    }
    auto f = [&](double y) {
        const double h = std::pow(y, e) * std::expm1(e * std::log1p((z - y) / y)) / e;
        return h * h;
    };
    return quad::integrate(f, lo, z);
}

double c3(double beta)
{
    const double e = 1.0 - beta;
    return 1.0 / (e * e * (2.0 * e + 1.0));
}

double c5(double z, double beta)
{
    const double e = 1.0 - beta;
    const double v = std::pow(z, e) / e;
    return (1.0 - z) * v * v;
}

double c6(double z, double beta)
{
    const double e = 1.0 - beta;
    return std::pow(z, 2.0 * e + 1.0) / (e * e * (2.0 * e + 1.0));
}

double c7(double z, double beta)
{
    const double e = 1.0 - beta;
    return std::pow(z, 2.0 * e + 1.0) / (e * e) * (1.0 - 2.0 / (e + 1.0) + 1.0 / (2.0 * e + 1.0));
}

double piecewise_c9(double t, double beta, double c, Branch branch)
{
    const double z = c / t;
    const bool inner = branch == Branch::Inner || (branch == Branch::Auto && t <= c);
    if (inner) return c1(z, beta) + c2(z, beta) + c3(beta);
    return c5(z, beta) + c6(z, beta) + c7(z, beta);
}

double c18(double c)
{
    require_positive("c", c);
    return c <= 1.0 ? c * c - c * c * c / 3.0 : c - 1.0 / 3.0;
}

bool is_gaussian_case(int j)
{
    return j >= 1 && j <= 12;
}

void require_case_beta(int j, double beta)
{
    if (j >= 10) return;
    switch ((j - 1) % 3) {
    case 0:
        if (!(beta > 0.5 && beta < 1.0)) throw DomainError("case " + std::to_string(j) + " requires LRD 1/2 < beta < 1");
        break;
    case 1:
        if (!(beta > 1.0)) throw DomainError("case " + std::to_string(j) + " requires SRD beta > 1");
        break;
    default:
        if (!(beta > 1.0 && beta < 1.5)) throw DomainError("case " + std::to_string(j) + " requires ND 1 < beta < 3/2");
    }
}

// sorted unique breakpoints in [lo, hi], with exponents for the local behaviour
std::vector<quad::Break> clip_breaks(std::vector<quad::Break> br, double lo, double hi)
{
    // coincident breaks are merged by integrate_piecewise, which keeps fractional powers
    std::vector<quad::Break> out{{lo, 0.0}, {hi, 0.0}};
    for (const auto& b : br) {
        if (b.x >= lo && b.x <= hi) out.push_back(b);
    }
    return out;
}

double moderate_product(double t, double s, double beta, double c)
{
    const double hi = std::min(t, s);
    if (hi <= -c) return 0.0;
    const double e = 1.0 - beta;
    auto f = [&](double u) { return moderate_kernel(u, t, beta, c) * moderate_kernel(u, s, beta, c); };
    const double at_end = t == s ? singular_exponent(e, 2.0) : singular_exponent(e, 1.0);
    auto br = clip_breaks({{0.0, singular_exponent(e, 2.0)}, {t - c, 0.0}, {s - c, 0.0}, {hi, at_end}}, -c, hi);
    return quad::integrate_piecewise(f, br);
}

} // namespace

std::vector<double> PathMatrix::column(std::size_t k) const
{
    std::vector<double> out(replicas);
    for (std::size_t r = 0; r < replicas; ++r) out[r] = at(r, k);
    return out;
}

double unit_increment(double y, double beta)
{
    const double e = 1.0 - beta;
    if (y <= 0.0) return e > 0.0 ? 1.0 / e : kInf;
    return power_increment(y, 1.0, e) / e;
}

double constant_C(int id, double t, double beta, double c, Branch branch)
{
    if (id < 0 || id > 20) throw UsageError("constant id must lie in 0..20");
    if (id >= 18) {
        require_positive("c", c);
        const double base = c18(c);
        if (id == 18) return base;
        require_positive("t", t);
        if (id == 19) return c * (1.0 - t / (3.0 * c)) / base;
        return c * c * (1.0 - c / (3.0 * t)) / base;
    }
    require_beta_constant(id, beta);
    if (id == 0) return c0(beta);
    if (id == 3 || id == 12) return c3(beta);
    require_positive("t", t);
    require_positive("c", c);
    const double z = c / t;
    switch (id) {
    case 1: return c1(z, beta);
    case 2: return c2(z, beta);
    case 4:
    case 11: return c1(z, beta) + c2(z, beta) + c3(beta);
    case 5:
    case 15: return c5(z, beta);
    case 6:
    case 14: return c6(z, beta);
    case 7: return c7(z, beta);
    case 8:
    case 13: return c5(z, beta) + c6(z, beta) + c7(z, beta);
    case 9:
    case 16: return piecewise_c9(t, beta, c, branch);
    case 10:
    case 17: return piecewise_c9(t, beta, c, Branch::Auto) / piecewise_c9(1.0, beta, c, Branch::Auto);
    default: break;
    }
    throw UsageError("unreachable constant id");
}

double hurst_index(int j, double beta)
{
    switch (j) {
    case 1: case 2: case 3: case 5: case 8: case 10:
        return 0.5;
    case 4: case 6: case 7: case 9:
        require_case_beta(j, beta);
        return 1.5 - beta;
    case 11:
        return 1.0;
    case 12:
        return std::numeric_limits<double>::quiet_NaN();
    default:
        throw UsageError("case index must lie in 1..12, got " + std::to_string(j));
    }
}

double constant_filter_variance(int j, double t, double c)
{
    if (t < 0.0) throw DomainError("time must be non-negative");
    if (t == 0.0) return 0.0;
    switch (j) {
    case 10: return t;
    case 11: return t * t;
    case 12: return t <= c ? t * t * constant_C(19, t, 0.0, c) : t * constant_C(20, t, 0.0, c);
    default: throw UsageError("constant-filter variance needs case 10, 11 or 12");
    }
}

double limit_variance(int j, double t, double beta, double c)
{
    if (!is_gaussian_case(j)) throw UsageError("case index must lie in 1..12, got " + std::to_string(j));
    if (j >= 10) return constant_filter_variance(j, t, c);
    require_case_beta(j, beta);
    if (t < 0.0) throw DomainError("time must be non-negative");
    if (t == 0.0) return 0.0;
    const double h2 = 2.0 * hurst_index(j, beta);
    switch (j) {
    case 7: return std::pow(t, h2) * constant_C(10, t, beta, c);
    case 9: return std::pow(t, h2) * constant_C(17, t, beta, c);
    default: return std::pow(t, h2);
    }
}

double clipped_power_difference(double u, double t, double c, double e)
{
    if (u <= -c || u >= t) return 0.0;
    const double first_base = std::min(t - u, c);
    if (u >= 0.0) return std::pow(first_base, e);
    // x^e - y^e = y^e expm1(e log1p((x - y) / y)) with x - y = min(t, c + u)
    const double y = -u;
    return std::pow(y, e) * std::expm1(e * std::log1p(std::min(t, c + u) / y));
}

double moderate_kernel(double u, double t, double beta, double c)
{
    const double e = 1.0 - beta;
    return clipped_power_difference(u, t, c, e) / e;
}

double GaussianLimit::variance(double t) const
{
    return limit_variance(case_index, t, beta, c);
}

double GaussianLimit::covariance(double t, double s) const
{
    if (t < 0.0 || s < 0.0) throw DomainError("times must be non-negative");
    if (t == 0.0 || s == 0.0) return 0.0;
    switch (source) {
    case CovarianceSource::Degenerate: return t * s;
    case CovarianceSource::StationaryIncrement:
        return 0.5 * (variance(t) + variance(s) - variance(std::abs(t - s)));
    case CovarianceSource::KernelQuadrature: {
        const double b = case_index == 12 ? 0.0 : beta;
        return moderate_product(t, s, b, c) / moderate_product(1.0, 1.0, b, c);
    }
    }
    throw UsageError("unknown covariance source");
}

GaussianLimit gaussian_limit(int j, double beta, double c)
{
    if (!is_gaussian_case(j)) throw UsageError("case index must lie in 1..12, got " + std::to_string(j));
    if (j == 12 || j == 7 || j == 9) require_positive("c", c);
    if (j < 10) require_case_beta(j, beta);
    GaussianLimit g{j, j >= 10 ? 0.0 : beta, c, hurst_index(j, beta), CovarianceSource::StationaryIncrement};
    if (j == 7 || j == 9 || j == 12) g.source = CovarianceSource::KernelQuadrature;
    if (j == 11) g.source = CovarianceSource::Degenerate;
    return g;
}

double gaussian_covariance(int j, double t, double s, double beta, double c)
{
    return gaussian_limit(j, beta, c).covariance(t, s);
}

PathMatrix simulate_gaussian_limit(const GaussianLimit& law, std::span<const double> t_grid,
                                   std::size_t replicas, std::uint64_t seed, unsigned threads)
{
    const std::size_t m = t_grid.size();
    if (m == 0) throw UsageError("time grid is empty");
    if (m > 64) throw UsageError("Gaussian limit simulation supports at most 64 time points");
    Eigen::MatrixXd cov(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            cov(a, b) = cov(b, a) = law.covariance(t_grid[a], t_grid[b]);
        }
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success) throw NumericalError("covariance factorisation failed");
    Eigen::VectorXd d = ldlt.vectorD();
    const double jitter = 1e-10;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) < -jitter) {
            throw NumericalError("covariance on the grid is not positive semidefinite (pivot " +
                                 std::to_string(d(i)) + ")");
        }
        d(i) = std::sqrt(std::max(d(i), 0.0));
    }
    Eigen::MatrixXd lower = ldlt.matrixL();
    Eigen::MatrixXd factor = ldlt.transpositionsP().transpose() * (lower * d.asDiagonal());

    PathMatrix out(replicas, m);
    parallel_for(replicas, threads, [&](std::size_t r) {
        Rng rng(seed, Purpose::Limit, r);
        Eigen::VectorXd z(m);
        for (std::size_t k = 0; k < m; ++k) z(k) = rng.normal();
        const Eigen::VectorXd x = factor * z;
        for (std::size_t k = 0; k < m; ++k) out.at(r, k) = x(k);
    });
    return out;
}

// ---------------------------------------------------------------------------

double pareto_stable_scale(double alpha)
{
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) throw DomainError("stable scale needs alpha in (0,1)u(1,2)");
    return std::tgamma(1.0 - alpha) * std::cos(kPi * alpha / 2.0);
}

double StableLimit::control_density() const
{
    return control > 0.0 ? control : pareto_stable_scale(alpha);
}

StableLimit stable_limit(int j, double alpha, double beta, double c, double filter_sum)
{
    if (j < 1 || j > 9) throw UsageError("stable limits exist for cases 1..9");
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable index must lie in (0, 2)");
    if (alpha == 1.0) throw DomainError("alpha = 1 is not supported");
    switch ((j - 1) % 3) {
    case 0:
        if (!(beta > 1.0 / alpha && beta < 1.0)) throw DomainError("stable LRD case needs 1/alpha < beta < 1");
        break;
    case 1:
        if (!(beta > 1.0)) throw DomainError("stable SRD case needs beta > 1");
        break;
    default:
        if (!(beta > std::max(1.0, 1.0 / alpha) && beta < 1.0 + 1.0 / alpha)) {
            throw DomainError("stable ND case needs max(1, 1/alpha) < beta < 1 + 1/alpha");
        }
    }
    if (j == 7 || j == 9) require_positive("c", c);
    return {j, alpha, beta, c, filter_sum};
}

double stable_kernel(const StableLimit& law, double u, double t)
{
    const double e = 1.0 - law.beta;
    switch (law.case_index) {
    case 1:
    case 3:
        return (u >= 0.0 && u < t) ? 1.0 / e : 0.0;
    case 2:
    case 5:
    case 8:
        return (u >= 0.0 && u < t) ? law.filter_sum : 0.0;
    case 4:
    case 6: {
        if (u >= t) return 0.0;
        if (u >= 0.0) return std::pow(t - u, e) / e;
        return power_increment(-u, t, e) / e;
    }
    case 7:
    case 9:
        return moderate_kernel(u, t, law.beta, law.c);
    default:
        throw UsageError("stable kernel needs case 1..9");
    }
}

KernelRepresentation stable_kernel_representation(const StableLimit& law, std::span<const double> times,
                                                  std::span<const double> weights)
{
    if (times.size() != weights.size() || times.empty()) throw UsageError("times and weights must match");
    std::vector<double> ts(times.begin(), times.end());
    std::vector<double> ws(weights.begin(), weights.end());
    for (double t : ts) {
        if (!(t >= 0.0)) throw DomainError("times must be non-negative");
    }
    KernelRepresentation rep;
    rep.kernel = [law, ts, ws](double u) {
        double v = 0.0;
        for (std::size_t l = 0; l < ts.size(); ++l) v += ws[l] * stable_kernel(law, u, ts[l]);
        return v;
    };
    const double tmax = *std::max_element(ts.begin(), ts.end());
    rep.upper = tmax;
    const int j = law.case_index;
    const double e = 1.0 - law.beta;
    if (j == 4 || j == 6 || j == 7 || j == 9) {
        rep.singular = ts;
        rep.singular.push_back(0.0);
        rep.singular_exponent = e;
    } else {
        rep.breaks = ts;
        rep.breaks.push_back(0.0);
    }
    if (j == 4 || j == 6) {
        rep.lower = -kInf;
        rep.tail_decay = law.beta;
        rep.breaks.push_back(-1.0 - tmax);
    } else if (j == 7 || j == 9) {
        rep.lower = -law.c;
        for (double t : ts) rep.breaks.push_back(t - law.c);
    } else {
        rep.lower = 0.0;
        rep.piecewise_constant = true;
    }
    return rep;
}

std::complex<double> stable_integral_log_cf(const KernelRepresentation& rep, double alpha, double skew,
                                            double control, double theta)
{
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) throw DomainError("alpha must lie in (0,1)u(1,2)");
    if (theta == 0.0) return {0.0, 0.0};
    const double p = rep.singular_exponent < 0.0 ? alpha * rep.singular_exponent : rep.singular_exponent;
    std::vector<quad::Break> br;
    for (double x : rep.breaks) {
        if (x > rep.lower && x < rep.upper) br.push_back({x, 0.0});
    }
    for (double x : rep.singular) {
        if (x >= rep.lower && x <= rep.upper) br.push_back({x, p});
    }
    br.push_back({rep.upper, 0.0});
    if (std::isfinite(rep.lower)) br.push_back({rep.lower, 0.0});
    std::sort(br.begin(), br.end(), [](const quad::Break& l, const quad::Break& r) { return l.x < r.x; });
    std::vector<double> pts;
    for (const auto& x : br) pts.push_back(x.x);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto mod = [&](double u) { return std::pow(std::abs(rep.kernel(u)), alpha); };
    auto sgn = [&](double u) {
        const double k = rep.kernel(u);
        return std::copysign(std::pow(std::abs(k), alpha), k);
    };
    double a = 0.0;
    double b = 0.0;
    if (rep.piecewise_constant) {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double len = pts[i + 1] - pts[i];
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            a += len * mod(mid);
            b += len * sgn(mid);
        }
    } else {
        a = quad::integrate_piecewise(mod, br);
        b = quad::integrate_piecewise(sgn, br);
        if (!std::isfinite(rep.lower)) {
            const double start = -pts.front();
            if (!(start > 0.0)) throw UsageError("infinite kernel support must start below zero");
            const double q = alpha * rep.tail_decay;
            auto fm = [&](double v) { return mod(-v); };
            auto fs = [&](double v) { return sgn(-v); };
            a += quad::integrate_tail(fm, start, q);
            b += quad::integrate_tail(fs, start, q);
        }
    }
    const double scale = control * std::pow(std::abs(theta), alpha);
    const double tau = std::tan(kPi * alpha / 2.0);
    return {-scale * a, scale * skew * tau * std::copysign(1.0, theta) * b};
}

std::complex<double> stable_log_cf(const StableLimit& law, double theta, double t)
{
    const double one = 1.0;
    return stable_log_cf(law, theta, std::span<const double>(&t, 1), std::span<const double>(&one, 1));
}

std::complex<double> stable_log_cf(const StableLimit& law, double theta, std::span<const double> times,
                                   std::span<const double> weights)
{
    const auto rep = stable_kernel_representation(law, times, weights);
    return stable_integral_log_cf(rep, law.alpha, law.skew, law.control_density(), theta);
}

} // namespace tapered
