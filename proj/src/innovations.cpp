#include "tapered/innovations.hpp"

#include "tapered/errors.hpp"
#include "tapered/quadrature.hpp"
#include "tapered/stats.hpp"

#include <cmath>
#include <string>

namespace tapered {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_alpha(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("tail index must be positive, got " + std::to_string(alpha));
    }
}

void require_uniform(double u)
{
    if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform variate must lie in (0, 1)");
}

void require_b(double b)
{
    if (!(b >= 1.0)) throw DomainError("taper level must be at least 1");
}

// E (b + R)^p, R ~ Exp(1)
double shifted_exp_moment(double b, double p)
{
    auto f = [&](double r) { return std::pow(1.0 + r / b, p) * std::exp(-r); };
    return std::pow(b, p) * quad::integrate(f, 0.0, kInf, {1e-13});
}

// int_lo^hi alpha x^{-alpha-1} |x - m|^p dx, 1 <= lo < hi <= inf
double pareto_part_central(double alpha, double m, double p, double lo, double hi)
{
    if (!(hi > lo)) return 0.0;
    auto f = [&](double x) { return alpha * std::pow(x, -alpha - 1.0) * std::pow(std::abs(x - m), p); };
    std::vector<quad::Break> br{{lo, 0.0}};
    const double far = std::max(2.0 * std::max(m, lo), lo + 1.0);
    if (m > lo && m < hi) br.push_back({m, p});
    double total = 0.0;
    if (far < hi) {
        br.push_back({far, 0.0});
        total += quad::integrate_piecewise(f, br);
        if (std::isinf(hi)) {
            total += quad::integrate_tail(f, far, alpha + 1.0 - p);
        } else {
            // log scale over a long power-law stretch
            auto g = [&](double s) {
                const double x = std::exp(s);
                return f(x) * x;
            };
            total += quad::integrate(g, std::log(far), std::log(hi));
        }
    } else {
        br.push_back({hi, 0.0});
        total += quad::integrate_piecewise(f, br);
    }
    return total;
}

} // namespace

TailIndex::TailIndex(double alpha) : alpha_(alpha)
{
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw DomainError("tail index must lie in (0, 2), got " + std::to_string(alpha));
    }
    if (alpha == 1.0) throw DomainError("tail index alpha = 1 is not supported");
}

TaperLevel TaperLevel::fixed(double b)
{
    require_b(b);
    TaperLevel t;
    t.b_ = b;
    return t;
}

TaperLevel TaperLevel::growing(double gamma)
{
    if (!(gamma > 0.0)) throw DomainError("taper growth exponent must be positive");
    TaperLevel t;
    t.gamma_ = gamma;
    return t;
}

double TaperLevel::at(long n) const
{
    if (!gamma_) return b_;
    if (n < 1) throw DomainError("sample size must be positive");
    return std::max(1.0, std::pow(static_cast<double>(n), *gamma_));
}

InnovationTaper classify_innovation_taper(double alpha, double gamma)
{
    require_alpha(alpha);
    if (!(gamma > 0.0)) throw DomainError("taper growth exponent must be positive");
    const double edge = 1.0 / alpha;
    if (gamma < edge) return InnovationTaper::Hard;
    if (gamma > edge) return InnovationTaper::Soft;
    return InnovationTaper::Intermediate;
}

InnovationSpec InnovationSpec::gaussian()
{
    return {};
}

InnovationSpec InnovationSpec::pareto(double alpha)
{
    InnovationSpec s{InnovationKind::Pareto, TailIndex(alpha), std::nullopt};
    return s;
}

InnovationSpec InnovationSpec::centered_pareto(double alpha)
{
    InnovationSpec s{InnovationKind::CenteredPareto, TailIndex(alpha), std::nullopt};
    s.validate();
    return s;
}

InnovationSpec InnovationSpec::tapered(double alpha, TaperLevel taper)
{
    return {InnovationKind::TaperedPareto, TailIndex(alpha), taper};
}

InnovationSpec InnovationSpec::centered_tapered(double alpha, TaperLevel taper)
{
    return {InnovationKind::CenteredTaperedPareto, TailIndex(alpha), taper};
}

InnovationSpec InnovationSpec::stable_pareto(double alpha)
{
    return alpha > 1.0 ? centered_pareto(alpha) : pareto(alpha);
}

InnovationSpec InnovationSpec::stable_tapered(double alpha, TaperLevel taper)
{
    return alpha > 1.0 ? centered_tapered(alpha, taper) : tapered(alpha, taper);
}

void InnovationSpec::validate() const
{
    if (kind == InnovationKind::GaussianUnit) {
        if (alpha || taper) throw UsageError("Gaussian innovations take no tail index or taper");
        return;
    }
    if (!alpha) throw UsageError("Pareto innovations need a tail index");
    if (kind == InnovationKind::CenteredPareto && !alpha->has_mean()) {
        throw DomainError("centred Pareto innovations need alpha > 1");
    }
    const bool tapered_kind =
        kind == InnovationKind::TaperedPareto || kind == InnovationKind::CenteredTaperedPareto;
    if (tapered_kind != taper.has_value()) {
        throw UsageError("taper level must be given exactly for the tapered kinds");
    }
}

bool InnovationSpec::is_tapered() const
{
    return kind == InnovationKind::TaperedPareto || kind == InnovationKind::CenteredTaperedPareto;
}

bool InnovationSpec::is_centered() const
{
    return kind == InnovationKind::CenteredPareto || kind == InnovationKind::CenteredTaperedPareto;
}

double sample_pareto(double alpha, double u)
{
    require_alpha(alpha);
    require_uniform(u);
    return std::pow(u, -1.0 / alpha);
}

double sample_tapered_pareto(double alpha, double b, double u1, double u2)
{
    require_b(b);
    require_uniform(u2);
    const double theta = sample_pareto(alpha, u1);
    return theta < b ? theta : b - std::log(u2);
}

double pareto_moment(double alpha, double p)
{
    require_alpha(alpha);
    if (!(p < alpha)) return kInf;
    return alpha / (alpha - p);
}

double tapered_moment(double alpha, double b, double p)
{
    require_alpha(alpha);
    require_b(b);
    if (!(p > 0.0)) throw DomainError("moment order must be positive");
    if (std::isinf(b)) return pareto_moment(alpha, p);
    double body;
    if (std::abs(p - alpha) < 1e-14) {
        body = alpha * std::log(b);
    } else {
        body = alpha * std::expm1((p - alpha) * std::log(b)) / (p - alpha);
    }
    return body + std::pow(b, -alpha) * shifted_exp_moment(b, p);
}

double tapered_central_abs_moment(double alpha, double b, double p)
{
    require_alpha(alpha);
    require_b(b);
    if (!(p > 0.0)) throw DomainError("moment order must be positive");
    if (std::isinf(b) && !(p < alpha)) return kInf;
    const double m = tapered_moment(alpha, b, 1.0);
    double total = pareto_part_central(alpha, m, p, 1.0, b);
    if (std::isfinite(b)) {
        auto f = [&](double r) { return std::pow(std::abs(b + r - m), p) * std::exp(-r); };
        std::vector<quad::Break> br{{0.0, 0.0}};
        const double kink = m - b;
        if (kink > 0.0) br.push_back({kink, p});
        const double hi = std::max(kink, 0.0) + 60.0 + 4.0 * p;
        br.push_back({hi, 0.0});
        double part = quad::integrate_piecewise(f, br);
        part += quad::integrate(f, hi, kInf);
        total += std::pow(b, -alpha) * part;
    }
    return total;
}

InnovationMoments innovation_moments(const InnovationSpec& spec, long n)
{
    switch (spec.kind) {
    case InnovationKind::GaussianUnit:
        return {0.0, 1.0};
    case InnovationKind::Pareto:
        return {0.0, kInf};
    case InnovationKind::CenteredPareto: {
        const double a = spec.alpha->value();
        return {a / (a - 1.0), kInf};
    }
    case InnovationKind::TaperedPareto:
    case InnovationKind::CenteredTaperedPareto: {
        const double a = spec.alpha->value();
        const double b = spec.taper->at(n);
        if (std::isinf(b)) {
            return {spec.is_centered() ? a / (a - 1.0) : 0.0, kInf};
        }
        const double m1 = tapered_moment(a, b, 1.0);
        const double m2 = tapered_moment(a, b, 2.0);
        return {spec.is_centered() ? m1 : 0.0, m2 - m1 * m1};
    }
    }
    throw UsageError("unknown innovation kind");
}

double innovation_abs_moment(const InnovationSpec& spec, long n, double p)
{
    if (!(p > 0.0)) throw DomainError("moment order must be positive");
    const double pi = 3.14159265358979323846;
    switch (spec.kind) {
    case InnovationKind::GaussianUnit:
        return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(pi);
    case InnovationKind::Pareto:
        return pareto_moment(spec.alpha->value(), p);
    case InnovationKind::TaperedPareto:
        return tapered_moment(spec.alpha->value(), spec.taper->at(n), p);
    case InnovationKind::CenteredPareto:
        return tapered_central_abs_moment(spec.alpha->value(), kInf, p);
    case InnovationKind::CenteredTaperedPareto:
        return tapered_central_abs_moment(spec.alpha->value(), spec.taper->at(n), p);
    }
    throw UsageError("unknown innovation kind");
}

void draw_innovations(const InnovationSpec& spec, long n, Rng& rng, std::span<double> out)
{
    if (spec.kind == InnovationKind::GaussianUnit) {
        for (double& x : out) x = rng.normal();
        return;
    }
    const double alpha = spec.alpha->value();
    const double inv = -1.0 / alpha;
    const double b = spec.is_tapered() ? spec.taper->at(n) : kInf;
    const double shift = innovation_moments(spec, n).mean;
    for (double& x : out) {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        const double theta = std::pow(u1, inv);
        x = (theta < b ? theta : b - std::log(u2)) - shift;
    }
}

MomentRatio moment_ratio_bound_check(double alpha, double gamma, long n, double delta)
{
    if (!(gamma > 0.0)) throw DomainError("taper growth exponent must be positive");
    if (n < 2) throw DomainError("moment ratio needs n >= 2");
    if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
    const double b = std::pow(static_cast<double>(n), gamma);
    const double m1 = tapered_moment(alpha, b, 1.0);
    const double var = tapered_moment(alpha, b, 2.0) - m1 * m1;
    const double top = tapered_central_abs_moment(alpha, b, 2.0 + delta);
    return {top / std::pow(var, (2.0 + delta) / 2.0),
            std::pow(static_cast<double>(n), gamma * alpha * delta / 2.0)};
}

double coupling_moment(double alpha, double b, double r, std::size_t draws, Rng& rng)
{
    require_alpha(alpha);
    require_b(b);
    if (!(r > 0.0)) throw DomainError("coupling moment order must be positive");
    if (std::isinf(b)) return 0.0;
    if (draws == 0) throw UsageError("coupling moment needs at least one draw");
    const double p = std::pow(b, -alpha);
    // E(zeta - theta) = b^{1-alpha} + b^{-alpha} - alpha b^{1-alpha} / (alpha - 1)
    const double mu = alpha > 1.0 ? std::pow(b, 1.0 - alpha) + p - alpha * std::pow(b, 1.0 - alpha) / (alpha - 1.0)
                                  : 0.0;
    stats::Accumulator acc;
    for (std::size_t k = 0; k < draws; ++k) {
        const double theta = b * std::pow(rng.uniform(), -1.0 / alpha);
        const double over = -std::log(rng.uniform());
        acc.add(std::pow(std::abs(b + over - theta - mu), r));
    }
    return (1.0 - p) * std::pow(std::abs(mu), r) + p * acc.value() / static_cast<double>(draws);
}

double coupling_moment_decay(double alpha, double r)
{
    require_alpha(alpha);
    if (!(r > 0.0 && r < alpha)) throw DomainError("coupling moment order must lie in (0, alpha)");
    if (alpha > 1.0 && r < 1.0) return (alpha - 1.0) * r;
    return alpha - r;
}

} // namespace tapered
