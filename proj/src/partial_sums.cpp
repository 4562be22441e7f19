#include "tapered/partial_sums.hpp"

#include "tapered/errors.hpp"
#include "tapered/parallel.hpp"
#include "tapered/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tapered {

namespace {

void require_case(int j)
{
    if (j < 1 || j > 12) throw UsageError("case index must lie in 1..12, got " + std::to_string(j));
}

double innovation_variance(const RegimeSpec& regime, long n)
{
    return innovation_moments(regime.innovation, n).variance;
}

} // namespace

Dependence case_dependence(int j)
{
    require_case(j);
    if (j >= 10) return Dependence::LRD;
    switch ((j - 1) % 3) {
    case 0: return Dependence::LRD;
    case 1: return Dependence::SRD;
    default: return Dependence::ND;
    }
}

FilterTaper case_taper(int j)
{
    require_case(j);
    const int k = j >= 10 ? j - 10 : (j - 1) / 3;
    switch (k) {
    case 0: return FilterTaper::Strong;
    case 1: return FilterTaper::Weak;
    default: return FilterTaper::Moderate;
    }
}

double default_beta(int j)
{
    require_case(j);
    if (j >= 10) return 0.0;
    switch (case_dependence(j)) {
    case Dependence::LRD: return 0.7;
    case Dependence::SRD: return 1.2;
    case Dependence::ND: return 1.25;
    }
    return 0.0;
}

double default_gamma1(int j)
{
    switch (case_taper(j)) {
    case FilterTaper::Strong: return 0.5;
    case FilterTaper::Weak: return 1.4;
    case FilterTaper::Moderate: return 1.0;
    }
    return 1.0;
}

LimitFamily RegimeSpec::family() const
{
    const auto& inn = innovation;
    if (inn.kind == InnovationKind::GaussianUnit) return LimitFamily::Gaussian;
    if (!inn.is_tapered()) return LimitFamily::Stable;
    const auto gamma = inn.taper->gamma();
    if (!gamma) return std::isinf(inn.taper->at(1)) ? LimitFamily::Stable : LimitFamily::Gaussian;
    switch (classify_innovation_taper(inn.alpha->value(), *gamma)) {
    case InnovationTaper::Hard: return LimitFamily::Gaussian;
    case InnovationTaper::Soft: return LimitFamily::Stable;
    case InnovationTaper::Intermediate: return LimitFamily::None;
    }
    return LimitFamily::None;
}

Dependence RegimeSpec::dependence() const
{
    return case_dependence(case_index);
}

FilterTaper RegimeSpec::taper() const
{
    return case_taper(case_index);
}

void RegimeSpec::validate() const
{
    require_case(case_index);
    innovation.validate();
    if (classify_filter_taper(gamma1) != case_taper(case_index)) {
        throw UsageError("case " + std::to_string(case_index) + " needs " + to_string(case_taper(case_index)) +
                         " filter tapering, gamma1 = " + std::to_string(gamma1) + " gives " +
                         to_string(classify_filter_taper(gamma1)));
    }
    if (!(c > 0.0)) throw DomainError("taper scale c must be positive");
    if (case_index >= 10) {
        if (filter.beta() != 0.0) throw UsageError("cases 10..12 use the constant filter");
    } else if (filter.dependence() != case_dependence(case_index) || filter.beta() == 0.0) {
        throw UsageError("case " + std::to_string(case_index) + " needs a " + to_string(case_dependence(case_index)) +
                         " filter");
    }
    switch (family()) {
    case LimitFamily::Gaussian:
        if (innovation.is_pareto_family() && !innovation.is_centered()) {
            throw UsageError("finite-variance input must be centred");
        }
        if (case_index <= 9 && !filter.gaussian_admissible()) {
            throw DomainError("beta = " + std::to_string(filter.beta()) + " is outside the Gaussian range for case " +
                              std::to_string(case_index));
        }
        break;
    case LimitFamily::Stable: {
        if (case_index >= 10) throw UsageError("cases 10..12 have Gaussian limits only");
        const double alpha = innovation.alpha->value();
        if (innovation.is_centered() != (alpha > 1.0)) {
            throw UsageError("heavy-tailed input is centred exactly when alpha > 1");
        }
        if (!filter.stable_admissible(alpha)) {
            throw DomainError("beta = " + std::to_string(filter.beta()) + " is outside the stable range for case " +
                              std::to_string(case_index) + " with alpha = " + std::to_string(alpha));
        }
        break;
    }
    case LimitFamily::None:
        break;
    }
}

GaussianLimit RegimeSpec::gaussian_law() const
{
    if (family() != LimitFamily::Gaussian) throw UsageError("regime does not have a Gaussian limit");
    return gaussian_limit(case_index, filter.beta(), c);
}

StableLimit RegimeSpec::stable_law() const
{
    if (family() != LimitFamily::Stable) throw UsageError("regime does not have a stable limit");
    const double sum = filter.dependence() == Dependence::SRD ? filter.total_sum() : 0.0;
    return stable_limit(case_index, innovation.alpha->value(), filter.beta(), c, sum);
}

RegimeSpec make_regime(int j, const RegimeOptions& opt)
{
    require_case(j);
    const double beta = opt.beta.value_or(default_beta(j));
    const double gamma1 = opt.gamma1.value_or(default_gamma1(j));
    std::optional<FilterSpec> filter;
    if (j >= 10) {
        if (beta != 0.0) throw UsageError("cases 10..12 use the constant filter (beta = 0)");
        filter = FilterSpec::constant();
    } else {
        switch (case_dependence(j)) {
        case Dependence::LRD: filter = FilterSpec::lrd(beta); break;
        case Dependence::SRD: filter = FilterSpec::srd(beta); break;
        case Dependence::ND: filter = FilterSpec::nd(beta); break;
        }
    }
    RegimeSpec r{j, *filter, gamma1, opt.c, opt.innovation};
    r.validate();
    return r;
}

long steps(long n, double t)
{
    if (n < 1) throw DomainError("sample size must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be non-negative and finite");
    const double v = std::floor(static_cast<double>(n) * t * (1.0 + 1e-12));
    if (v > 4e9) throw SizeError("floor(n t) too large");
    return static_cast<long>(v);
}

double CoefficientProfile::at(long i) const
{
    if (i < i_min || i > i_max()) return 0.0;
    return values[static_cast<std::size_t>(i - i_min)];
}

CoefficientProfile coefficient_profile(const TaperedFilter& filter, double t)
{
    const long n = filter.n();
    const long m = steps(n, t);
    const long lag = filter.lag();
    const double total = static_cast<double>(m) + static_cast<double>(lag) + 1.0;
    if (total > 1.5e9) throw SizeError("coefficient profile would hold " + std::to_string(total) + " entries");
    const auto prefix = filter.prefix_sums();
    auto P = [&](long k) { return prefix[static_cast<std::size_t>(std::min(k, lag))]; };
    CoefficientProfile out;
    out.n = n;
    out.t = t;
    out.lag = lag;
    out.i_min = -lag;
    out.values.resize(static_cast<std::size_t>(m + lag + 1));
    for (long i = -lag; i <= m; ++i) {
        const double d = i <= 0 ? P(m - i) - P(-i) : P(m - i);
        out.values[static_cast<std::size_t>(i + lag)] = d;
    }
    return out;
}

CoefficientProfile coefficient_profile(const RegimeSpec& regime, long n, double t)
{
    return coefficient_profile(regime.filter_at(n), t);
}

double exact_variance(const CoefficientProfile& profile, double innovation_var)
{
    stats::Accumulator acc;
    for (double d : profile.values) acc.add(d * d);
    return innovation_var * acc.value();
}

double exact_covariance(const CoefficientProfile& p1, const CoefficientProfile& p2, double innovation_var)
{
    if (p1.n != p2.n || p1.lag != p2.lag) throw UsageError("profiles belong to different sample sizes or filters");
    stats::Accumulator acc;
    const long hi = std::min(p1.i_max(), p2.i_max());
    for (long i = p1.i_min; i <= hi; ++i) acc.add(p1.at(i) * p2.at(i));
    return innovation_var * acc.value();
}

VarianceSplit variance_split(const CoefficientProfile& profile)
{
    stats::Accumulator lo, hi;
    for (long i = profile.i_min; i <= profile.i_max(); ++i) {
        const double d = profile.at(i);
        (i <= 0 ? lo : hi).add(d * d);
    }
    return {lo.value(), hi.value()};
}

double asymptotic_gaussian_norm_sq(const RegimeSpec& regime, long n)
{
    const double nn = static_cast<double>(n);
    const double beta = regime.filter.beta();
    const double g1 = regime.gamma1;
    const double c = regime.c;
    switch (regime.case_index) {
    case 1:
    case 3:
        return std::pow(1.0 - beta, -2.0) * std::pow(nn, 1.0 + 2.0 * g1 * (1.0 - beta));
    case 2:
    case 5:
    case 8: {
        const double s = regime.filter.total_sum();
        return s * s * nn;
    }
    case 4: return (constant_C(0, 1.0, beta, c) + constant_C(3, 1.0, beta, c)) * std::pow(nn, 3.0 - 2.0 * beta);
    case 6: return (constant_C(0, 1.0, beta, c) + constant_C(12, 1.0, beta, c)) * std::pow(nn, 3.0 - 2.0 * beta);
    case 7: return constant_C(9, 1.0, beta, c) * std::pow(nn, 3.0 - 2.0 * beta);
    case 9: return constant_C(16, 1.0, beta, c) * std::pow(nn, 3.0 - 2.0 * beta);
    case 10: return std::pow(nn, 1.0 + 2.0 * g1);
    case 11: return std::pow(nn, 2.0 + g1);
    case 12: return constant_C(18, 1.0, 0.0, c) * nn * nn * nn;
    default: break;
    }
    throw UsageError("unknown case index");
}

Normalizer normalizer(const RegimeSpec& regime, long n, NormalizerKind kind)
{
    const int j = regime.case_index;
    switch (regime.family()) {
    case LimitFamily::Gaussian: {
        const double base = kind == NormalizerKind::Exact ? exact_variance(coefficient_profile(regime, n, 1.0))
                                                          : asymptotic_gaussian_norm_sq(regime, n);
        const bool scaled = regime.innovation.is_pareto_family();
        const double var = scaled ? innovation_variance(regime, n) : 1.0;
        return {j, n, std::sqrt(base * var), scaled, kind};
    }
    case LimitFamily::Stable: {
        const double alpha = regime.innovation.alpha->value();
        const double beta = regime.filter.beta();
        const double nn = static_cast<double>(n);
        double z = 1.0;
        switch (j) {
        case 1:
        case 3: z = std::pow(nn, regime.gamma1 * (1.0 - beta)); break;
        case 4:
        case 6:
        case 7:
        case 9: z = std::pow(nn, 1.0 - beta); break;
        default: break;
        }
        return {j, n, std::pow(nn, 1.0 / alpha) * z, false, NormalizerKind::Asymptotic};
    }
    case LimitFamily::None:
        break;
    }
    throw UsageError("intermediate innovation tapering has no limit law and no normaliser");
}

std::vector<double> simulate_partial_sum_path(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                              std::uint64_t seed, std::uint64_t replica)
{
    PathEngine engine(regime, n, std::vector<double>(t_grid.begin(), t_grid.end()));
    return engine.simulate(seed, replica);
}

std::vector<double> normalized_process(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                       std::uint64_t seed, std::uint64_t replica)
{
    auto path = simulate_partial_sum_path(regime, n, t_grid, seed, replica);
    const double a = normalizer(regime, n).value;
    for (double& v : path) v /= a;
    return path;
}

double lyapunov_delta_bound(const RegimeSpec& regime)
{
    if (regime.filter.dependence() == Dependence::ND) {
        const double beta = regime.filter.beta();
        return std::min(1.0, (3.0 - 2.0 * beta) / (beta - 1.0));
    }
    return 1.0;
}

double default_lyapunov_delta(const RegimeSpec& regime)
{
    if (regime.filter.dependence() == Dependence::ND) {
        const double beta = regime.filter.beta();
        return std::min(1.0, (3.0 - 2.0 * beta) / (2.0 * (beta - 1.0)));
    }
    return 1.0;
}

double lyapunov_fraction(const RegimeSpec& regime, long n, double t, double delta)
{
    regime.validate();
    if (regime.family() != LimitFamily::Gaussian) throw UsageError("Lyapunov fractions need finite-variance input");
    if (!(delta > 0.0 && delta <= 1.0)) throw UsageError("Lyapunov order delta must lie in (0, 1]");
    if (regime.filter.dependence() == Dependence::ND) {
        const double beta = regime.filter.beta();
        if (!(delta < (3.0 - 2.0 * beta) / (beta - 1.0))) {
            throw UsageError("Lyapunov order delta must stay below (3-2beta)/(beta-1) for ND filters");
        }
    }
    const double p = 2.0 + delta;
    const auto prof_t = coefficient_profile(regime, n, t);
    const auto prof_1 = coefficient_profile(regime, n, 1.0);
    stats::Accumulator num;
    for (double d : prof_t.values) num.add(std::pow(std::abs(d), p));
    const double den = std::pow(exact_variance(prof_1), p / 2.0);
    const double var = innovation_variance(regime, n);
    const double moment = innovation_abs_moment(regime.innovation, n, p) / std::pow(var, p / 2.0);
    return num.value() * moment / den;
}

MeanEstimate coupling_distance(const RegimeSpec& regime, long n, double t, double r, std::size_t replicas,
                               std::uint64_t seed, CouplingMethod method, unsigned threads)
{
    regime.validate();
    const auto& inn = regime.innovation;
    if (!inn.is_tapered()) throw UsageError("coupling needs tapered Pareto innovations");
    const double alpha = inn.alpha->value();
    const double b = inn.taper->at(n);
    if (std::isinf(b)) return {0.0, 0.0};
    if (regime.family() != LimitFamily::Stable || !inn.taper->gamma()) {
        throw UsageError("coupling is defined for soft innovation tapering (gamma > 1/alpha)");
    }
    if (!(r > 0.0 && r < alpha)) throw UsageError("coupling order r must lie in (0, alpha)");
    if (alpha > 1.0 && r < 1.0) throw UsageError("coupling order r must be at least 1 when alpha > 1");
    if (replicas < 2) throw UsageError("coupling needs at least two replicas");

    const auto prof = coefficient_profile(regime, n, t);
    const double scale = normalizer(regime, n).value;
    const double dsum = stats::sum(prof.values);
    const double p = std::pow(b, -alpha);
    const double mu = alpha > 1.0 ? std::pow(b, 1.0 - alpha) + p - alpha * std::pow(b, 1.0 - alpha) / (alpha - 1.0) : 0.0;
    const double drift = mu * dsum;
    const std::size_t count = prof.values.size();
    const double log_keep = std::log1p(-std::min(p, 1.0));

    std::vector<double> vals(replicas);
    parallel_for(replicas, threads, [&](std::size_t rep) {
        double acc = 0.0;
        if (method == CouplingMethod::Sparse) {
            Rng rng(seed, Purpose::Coupling, rep);
            double pos = -1.0;
            while (true) {
                const double gap = log_keep == -std::numeric_limits<double>::infinity()
                                       ? 0.0
                                       : std::floor(std::log(rng.uniform()) / log_keep);
                pos += gap + 1.0;
                if (pos >= static_cast<double>(count)) break;
                const double theta = b * std::pow(rng.uniform(), -1.0 / alpha);
                const double over = rng.exponential();
                acc += prof.values[static_cast<std::size_t>(pos)] * (b + over - theta);
            }
        } else {
            Rng rng(seed, Purpose::Innovations, rep);
            for (std::size_t i = 0; i < count; ++i) {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                const double theta = std::pow(u1, -1.0 / alpha);
                if (theta >= b) acc += prof.values[i] * (b - std::log(u2) - theta);
            }
        }
        vals[rep] = std::pow(std::abs((acc - drift) / scale), r);
    });
    const double m = stats::mean(vals);
    return {m, std::sqrt(stats::variance(vals) / static_cast<double>(replicas))};
}

} // namespace tapered
