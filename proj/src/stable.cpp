#include "tapered/errors.hpp"
#include "tapered/limit_laws.hpp"
#include "tapered/parallel.hpp"
#include "tapered/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tapered {

namespace {

constexpr double kPi = 3.14159265358979323846;

double local_power(double e, double power)
{
    return e < 0.0 ? power * e : e;
}

} // namespace

TFKernel::TFKernel(double H_, double alpha_, double c_) : H(H_), alpha(alpha_), c(c_)
{
    if (!(H > 0.0)) throw DomainError("H must be positive");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
    if (alpha == 1.0) throw DomainError("alpha = 1 is not supported");
    if (!(c > 0.0)) throw DomainError("c must be positive");
}

double TFKernel::operator()(double t, double u) const
{
    return clipped_power_difference(u, t, c, exponent());
}

KernelRepresentation TFKernel::representation(std::span<const double> times, std::span<const double> weights) const
{
    if (times.size() != weights.size() || times.empty()) throw UsageError("times and weights must match");
    std::vector<double> ts(times.begin(), times.end());
    std::vector<double> ws(weights.begin(), weights.end());
    KernelRepresentation rep;
    const TFKernel self = *this;
    rep.kernel = [self, ts, ws](double u) {
        double v = 0.0;
        for (std::size_t l = 0; l < ts.size(); ++l) v += ws[l] * self(ts[l], u);
        return v;
    };
    rep.lower = -c;
    rep.upper = std::max(-c, *std::max_element(ts.begin(), ts.end()));
    rep.singular = ts;
    rep.singular.push_back(0.0);
    rep.singular_exponent = exponent();
    for (double t : ts) rep.breaks.push_back(t - c);
    return rep;
}

double tf3_covariance(double H, double c, double t, double s, double sigma)
{
    const TFKernel k(H, 2.0, c);
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    const double hi = std::min(t, s);
    if (hi <= -c) return 0.0;
    const double e = k.exponent();
    auto f = [&](double u) { return k(t, u) * k(s, u); };
    std::vector<quad::Break> br{{-c, 0.0}, {hi, t == s ? local_power(e, 2.0) : local_power(e, 1.0)}};
    for (double x : {0.0, t - c, s - c}) {
        if (x > -c && x < hi) br.push_back({x, x == 0.0 ? local_power(e, 2.0) : 0.0});
    }
    return sigma * quad::integrate_piecewise(f, br);
}

double tf3_matching_sigma(double beta, double c)
{
    if (!(beta > 0.5 && beta < 1.0)) throw DomainError("matching sigma needs 1/2 < beta < 1");
    return 1.0 / tf3_covariance(1.5 - beta, c, 1.0, 1.0, 1.0);
}

double stable_variate(double alpha, double skew, Rng& rng)
{
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0) throw DomainError("stable sampler needs alpha in (0,1)u(1,2)");
    if (!(skew >= -1.0 && skew <= 1.0)) throw DomainError("skewness must lie in [-1, 1]");
    const double v = kPi * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    const double tau = skew * std::tan(kPi * alpha / 2.0);
    const double shift = std::atan(tau) / alpha;
    const double scale = std::pow(1.0 + tau * tau, 1.0 / (2.0 * alpha));
    const double arg = alpha * (v + shift);
    return scale * std::sin(arg) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - arg) / w, (1.0 - alpha) / alpha);
}

PathMatrix simulate_tfsm3(const TFKernel& kernel, std::span<const double> t_grid, std::size_t replicas,
                          std::uint64_t seed, const Tfsm3Options& opt)
{
    if (t_grid.empty()) throw UsageError("time grid is empty");
    if (!(opt.sigma > 0.0)) throw DomainError("sigma must be positive");
    const double alpha = kernel.alpha;
    const bool gaussian = alpha == 2.0;
    if (!gaussian && !(opt.skew >= -1.0 && opt.skew <= 1.0)) throw DomainError("skewness must lie in [-1, 1]");
    const double c = kernel.c;
    const double tmax = *std::max_element(t_grid.begin(), t_grid.end());
    const std::size_t m = t_grid.size();
    PathMatrix out(replicas, m);
    if (tmax <= -c) return out;

    const double span = c + tmax;
    const double want = opt.step > 0.0 ? opt.step : span / 65536.0;
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::round(span / want)));
    if (cells > (std::size_t{1} << 26)) throw SizeError("TFSM grid has too many cells");
    const double step = span / static_cast<double>(cells);
    const double e = kernel.exponent();

    // weights[g][k]: cell value of h(t_g; .); cells near a singular point carry
    // their exact L^alpha mass with the sign of the signed mass
    std::vector<std::vector<double>> weights(m);
    std::vector<std::size_t> active(m, 0);
    for (std::size_t g = 0; g < m; ++g) {
        const double t = t_grid[g];
        auto& w = weights[g];
        if (t <= -c) continue;
        const std::size_t kmax = std::min(cells, static_cast<std::size_t>(std::ceil((t + c) / step)));
        active[g] = kmax;
        w.assign(kmax, 0.0);
        for (std::size_t k = 0; k < kmax; ++k) {
            const double a = -c + static_cast<double>(k) * step;
            const double b = std::min(a + step, t);
            const bool near = e < 0.0 && (std::abs(a) < 2.5 * step || std::abs(b) < 2.5 * step ||
                                          std::abs(t - a) < 2.5 * step || std::abs(t - b) < 2.5 * step);
            if (!near) {
                w[k] = kernel(t, 0.5 * (a + b)) * std::pow((b - a) / step, 1.0 / alpha);
                continue;
            }
            auto absf = [&](double u) { return std::pow(std::abs(kernel(t, u)), alpha); };
            auto sgnf = [&](double u) {
                const double v = kernel(t, u);
                return std::copysign(std::pow(std::abs(v), alpha), v);
            };
            std::vector<quad::Break> br{{a, 0.0}, {b, 0.0}};
            for (double x : {0.0, t}) {
                if (x >= a && x <= b) br.push_back({x, local_power(e, alpha)});
            }
            for (double x : {t - c}) {
                if (x > a && x < b) br.push_back({x, 0.0});
            }
            const double mass = quad::integrate_piecewise(absf, br);
            const double signed_mass = quad::integrate_piecewise(sgnf, br);
            w[k] = std::copysign(std::pow(mass / step, 1.0 / alpha), signed_mass);
        }
    }

    const double cell_scale = gaussian ? std::sqrt(opt.sigma * step) : std::pow(opt.sigma * step, 1.0 / alpha);
    const std::size_t used = *std::max_element(active.begin(), active.end());
    parallel_for(replicas, resolve_threads(static_cast<int>(opt.threads)), [&](std::size_t r) {
        Rng rng(seed, Purpose::Limit, r);
        std::vector<double> s(used);
        for (double& x : s) x = gaussian ? rng.normal() : stable_variate(alpha, opt.skew, rng);
        for (std::size_t g = 0; g < m; ++g) {
            double acc = 0.0;
            const auto& w = weights[g];
            for (std::size_t k = 0; k < active[g]; ++k) acc += w[k] * s[k];
            out.at(r, g) = cell_scale * acc;
        }
    });
    return out;
}

} // namespace tapered
