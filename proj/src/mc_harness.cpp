#include "tapered/mc_harness.hpp"

#include "tapered/errors.hpp"
#include "tapered/parallel.hpp"
#include "tapered/stats.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

namespace tapered {

namespace {

// Bootstrap streams are keyed by (n, cell) so rows never share resamples.
Rng bootstrap_rng(std::uint64_t seed, long n, std::uint64_t cell)
{
    return Rng(seed, Purpose::Bootstrap, stream_id(static_cast<std::uint64_t>(n), cell));
}

std::string num_text(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

ReportRow scored(ReportRow row, double threshold)
{
    if (row.std_error > 0.0) {
        row.z = (row.estimate - row.theory) / row.std_error;
    } else {
        row.z = row.estimate == row.theory ? 0.0 : std::copysign(HUGE_VAL, row.estimate - row.theory);
    }
    row.pass = std::abs(row.z) <= threshold;
    return row;
}

void require_ladder(const ExperimentPlan& plan)
{
    if (plan.n_ladder.empty()) throw UsageError("n ladder is empty");
    for (std::size_t k = 0; k < plan.n_ladder.size(); ++k) {
        if (plan.n_ladder[k] < 1) throw UsageError("n ladder entries must be positive");
        if (k > 0 && plan.n_ladder[k] <= plan.n_ladder[k - 1]) throw UsageError("n ladder must be ascending");
    }
}

} // namespace

std::string to_string(Check c)
{
    switch (c) {
    case Check::Variance: return "variance";
    case Check::Covariance: return "covariance";
    case Check::GaussianKS: return "ks";
    case Check::StableCF: return "cf";
    case Check::Lyapunov: return "lyapunov";
    case Check::Coupling: return "coupling";
    }
    return "?";
}

Check check_from_string(const std::string& s)
{
    for (Check c : {Check::Variance, Check::Covariance, Check::GaussianKS, Check::StableCF, Check::Lyapunov,
                    Check::Coupling}) {
        if (to_string(c) == s) return c;
    }
    throw UsageError("unknown check '" + s + "'");
}

void ExperimentPlan::validate() const
{
    regime.validate();
    require_ladder(*this);
    if (t_grid.empty()) throw UsageError("t grid is empty");
    for (double t : t_grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("t grid must hold finite t > 0");
    }
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw UsageError("t grid must be ascending");
    if (replicas < 100) throw UsageError("at least 100 replicas are needed for interval estimates");
    std::vector<double> sorted = theta_grid;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k] != -sorted[sorted.size() - 1 - k]) throw UsageError("theta grid must be symmetric about 0");
    }
    if (!(threshold > 0.0)) throw UsageError("z threshold must be positive");
}

double ComparisonReport::pass_fraction() const
{
    if (rows.empty()) return 0.0;
    const auto ok = std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
    return static_cast<double>(ok) / static_cast<double>(rows.size());
}

bool ComparisonReport::passed() const
{
    return !rows.empty() && pass_fraction() >= required_fraction;
}

void ComparisonReport::append(const ComparisonReport& other)
{
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

PathMatrix simulate_normalized_paths(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                     std::size_t replicas, std::uint64_t seed, unsigned threads, NormalizerKind kind)
{
    const PathEngine engine(regime, n, std::vector<double>(t_grid.begin(), t_grid.end()));
    const double scale = normalizer(regime, n, kind).value;
    if (!(scale > 0.0) || !std::isfinite(scale)) throw NumericalError("normaliser is not a positive finite number");
    PathMatrix out(replicas, t_grid.size());
    parallel_for(replicas, threads, [&](std::size_t r) {
        const auto path = engine.simulate(seed, r);
        for (std::size_t k = 0; k < path.size(); ++k) out.at(r, k) = path[k] / scale;
    });
    return out;
}

ComparisonReport run_gaussian_check(const ExperimentPlan& plan)
{
    plan.validate();
    const auto& regime = plan.regime;
    if (regime.family() != LimitFamily::Gaussian) {
        throw UsageError("Gaussian checks need Gaussian or hard-tapered Pareto innovations");
    }
    const auto law = regime.gaussian_law();
    const auto& tg = plan.t_grid;
    ComparisonReport report;
    report.threshold = plan.threshold;

    for (long n : plan.n_ladder) {
        const PathMatrix z = simulate_normalized_paths(regime, n, tg, plan.replicas, plan.master_seed, plan.threads,
                                                       plan.normalizer);
        const double scale = normalizer(regime, n, plan.normalizer).value;
        const double inn_var = regime.innovation.is_pareto_family() ? innovation_moments(regime.innovation, n).variance
                                                                    : 1.0;
        std::vector<std::vector<double>> cols;
        for (std::size_t k = 0; k < tg.size(); ++k) cols.push_back(z.column(k));
        std::uint64_t cell = 0;

        for (std::size_t k = 0; k < tg.size(); ++k) {
            const auto& x = cols[k];
            const double est = stats::variance(x);
            if (plan.checks.count(Check::Variance)) {
                Rng rng = bootstrap_rng(plan.master_seed, n, cell++);
                const double se = stats::bootstrap_sd(x.size(), plan.bootstrap, rng, [&](std::span<const std::size_t> idx) {
                    stats::Accumulator s1;
                    for (std::size_t i : idx) s1.add(x[i]);
                    const double m = s1.value() / static_cast<double>(idx.size());
                    stats::Accumulator s2;
                    for (std::size_t i : idx) s2.add((x[i] - m) * (x[i] - m));
                    return s2.value() / static_cast<double>(idx.size() - 1);
                });
                ReportRow row{"variance", regime.case_index, n, tg[k]};
                row.estimate = est;
                row.std_error = se;
                row.theory = law.variance(tg[k]);
                report.rows.push_back(scored(row, plan.threshold));

                // the simulation must reproduce the deterministic finite-n variance
                row.check = "variance_exact";
                row.theory = exact_variance(coefficient_profile(regime, n, tg[k]), inn_var) / (scale * scale);
                report.rows.push_back(scored(row, plan.threshold));

                ReportRow mrow{"mean", regime.case_index, n, tg[k]};
                mrow.estimate = stats::mean(x);
                mrow.std_error = std::sqrt(est / static_cast<double>(x.size()));
                mrow.theory = 0.0;
                report.rows.push_back(scored(mrow, plan.threshold));
            }
            if (plan.checks.count(Check::GaussianKS)) {
                const auto ks = stats::ks_normal(x, stats::mean(x), std::sqrt(est));
                ReportRow row{"ks", regime.case_index, n, tg[k]};
                row.estimate = ks.statistic;
                row.p_value = ks.p_value;
                row.pass = ks.p_value > 0.01;
                report.rows.push_back(row);
            }
        }
        if (plan.checks.count(Check::Covariance)) {
            for (std::size_t k = 0; k < tg.size(); ++k) {
                for (std::size_t l = k + 1; l < tg.size(); ++l) {
                    const auto& x = cols[k];
                    const auto& y = cols[l];
                    Rng rng = bootstrap_rng(plan.master_seed, n, cell++);
                    const double se = stats::bootstrap_sd(x.size(), plan.bootstrap, rng, [&](std::span<const std::size_t> idx) {
                        stats::Accumulator sx, sy;
                        for (std::size_t i : idx) {
                            sx.add(x[i]);
                            sy.add(y[i]);
                        }
                        const double m = static_cast<double>(idx.size());
                        const double mx = sx.value() / m, my = sy.value() / m;
                        stats::Accumulator sxy;
                        for (std::size_t i : idx) sxy.add((x[i] - mx) * (y[i] - my));
                        return sxy.value() / (m - 1.0);
                    });
                    ReportRow row{"covariance", regime.case_index, n, tg[k], tg[l]};
                    row.estimate = stats::covariance(x, y);
                    row.std_error = se;
                    row.theory = law.covariance(tg[k], tg[l]);
                    report.rows.push_back(scored(row, plan.threshold));
                }
            }
        }
    }
    return report;
}

ComparisonReport run_stable_check(const ExperimentPlan& plan)
{
    plan.validate();
    const auto& regime = plan.regime;
    if (regime.family() != LimitFamily::Stable) {
        throw UsageError("stable checks need raw or soft-tapered Pareto innovations");
    }
    const auto law = regime.stable_law();
    const auto& tg = plan.t_grid;
    ComparisonReport report;
    report.threshold = plan.threshold;

    for (long n : plan.n_ladder) {
        const double draws = static_cast<double>(n) * static_cast<double>(plan.replicas);
        if (draws > plan.max_draws) {
            const auto fit = static_cast<long>(plan.max_draws / static_cast<double>(n));
            throw SizeError("n * replicas = " + num_text(draws) + " exceeds the cap " + num_text(plan.max_draws) +
                            "; try --replicas " + std::to_string(fit) + " at n = " + std::to_string(n));
        }
        const PathMatrix z = simulate_normalized_paths(regime, n, tg, plan.replicas, plan.master_seed, plan.threads);
        std::uint64_t cell = 0;

        auto cf_rows = [&](const std::vector<double>& x, double t, double theta, std::complex<double> theory,
                           const std::string& tag) {
            const std::size_t R = x.size();
            std::vector<double> re(R), im(R);
            for (std::size_t i = 0; i < R; ++i) {
                re[i] = std::cos(theta * x[i]);
                im[i] = std::sin(theta * x[i]);
            }
            const std::complex<double> est(stats::mean(re), stats::mean(im));
            Rng rng_re = bootstrap_rng(plan.master_seed, n, cell++);
            Rng rng_im = bootstrap_rng(plan.master_seed, n, cell++);
            auto boot_mean = [](const std::vector<double>& v) {
                return [&v](std::span<const std::size_t> idx) {
                    stats::Accumulator s;
                    for (std::size_t i : idx) s.add(v[i]);
                    return s.value() / static_cast<double>(idx.size());
                };
            };
            const double se_re = stats::bootstrap_sd(R, plan.bootstrap, rng_re, boot_mean(re));
            const double se_im = stats::bootstrap_sd(R, plan.bootstrap, rng_im, boot_mean(im));

            ReportRow row{tag + "_re", regime.case_index, n, t};
            row.theta = theta;
            row.estimate = est.real();
            row.std_error = se_re;
            row.theory = theory.real();
            report.rows.push_back(scored(row, plan.threshold));
            row.check = tag + "_im";
            row.estimate = est.imag();
            row.std_error = se_im;
            row.theory = theory.imag();
            report.rows.push_back(scored(row, plan.threshold));
            row.check = tag + "_mod";
            row.estimate = std::abs(est - theory);
            row.std_error = std::hypot(se_re, se_im);
            row.theory = 0.0;
            report.rows.push_back(scored(row, plan.threshold));
        };

        for (std::size_t k = 0; k < tg.size(); ++k) {
            const auto x = z.column(k);
            for (double theta : plan.theta_grid) {
                cf_rows(x, tg[k], theta, std::exp(stable_log_cf(law, theta, tg[k])), "cf");
            }
        }
        if (tg.size() > 1) {
            const std::vector<double> w(tg.size(), 1.0);
            std::vector<double> comb(z.replicas, 0.0);
            for (std::size_t r = 0; r < z.replicas; ++r) {
                for (std::size_t k = 0; k < tg.size(); ++k) comb[r] += z.at(r, k);
            }
            for (double theta : plan.theta_grid) {
                cf_rows(comb, tg.back(), theta, std::exp(stable_log_cf(law, theta, tg, w)), "cf_joint");
            }
        }
    }
    return report;
}

ComparisonReport run_lyapunov_sweep(const ExperimentPlan& plan)
{
    plan.regime.validate();
    require_ladder(plan);
    if (plan.n_ladder.size() < 2) throw UsageError("insufficient data: a slope needs at least two sample sizes");
    const auto& regime = plan.regime;
    const double delta = plan.delta.value_or(default_lyapunov_delta(regime));
    ComparisonReport report;
    report.threshold = plan.threshold;
    for (double t : plan.t_grid) {
        std::vector<double> lx, ly;
        for (long n : plan.n_ladder) {
            ReportRow row{"lyapunov", regime.case_index, n, t};
            row.estimate = lyapunov_fraction(regime, n, t, delta);
            row.pass = std::isfinite(row.estimate) && row.estimate > 0.0;
            report.rows.push_back(row);
            lx.push_back(std::log(static_cast<double>(n)));
            ly.push_back(std::log(row.estimate));
        }
        const auto fit = stats::ols(lx, ly);
        ReportRow row{"lyapunov_slope", regime.case_index, plan.n_ladder.back(), t};
        row.estimate = fit.slope;
        row.std_error = fit.slope_se;
        row.theory = 0.0;
        row.z = fit.slope_se > 0.0 ? fit.slope / fit.slope_se : kNoValue;
        row.pass = fit.slope < 0.0;
        report.rows.push_back(row);
    }
    return report;
}

ComparisonReport run_coupling_check(const ExperimentPlan& plan, double r)
{
    plan.regime.validate();
    require_ladder(plan);
    const auto& regime = plan.regime;
    const auto& inn = regime.innovation;
    if (!inn.is_tapered() || !inn.taper->gamma()) throw UsageError("coupling checks need growing innovation tapers");
    const double alpha = inn.alpha->value();
    const double gamma = *inn.taper->gamma();
    if (classify_innovation_taper(alpha, gamma) != InnovationTaper::Soft) {
        throw UsageError("coupling checks need soft tapering (gamma > 1/alpha)");
    }
    if (plan.t_grid.empty()) throw UsageError("t grid is empty");
    const double t = plan.t_grid.front();
    ComparisonReport report;
    report.threshold = plan.threshold;
    std::vector<double> lx, ly;
    for (long n : plan.n_ladder) {
        const auto est = coupling_distance(regime, n, t, r, plan.replicas, plan.master_seed, plan.coupling, plan.threads);
        ReportRow row{"coupling", regime.case_index, n, t};
        row.estimate = est.estimate;
        row.std_error = est.std_error;
        row.pass = std::isfinite(est.estimate);
        report.rows.push_back(row);
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(est.estimate));
    }
    if (plan.n_ladder.size() >= 2) {
        const auto fit = stats::ols(lx, ly);
        ReportRow row{"coupling_slope", regime.case_index, plan.n_ladder.back(), t};
        row.estimate = fit.slope;
        row.std_error = fit.slope_se;
        row.theory = (alpha - r) * (1.0 / alpha - gamma);
        row.z = fit.slope_se > 0.0 ? (fit.slope - row.theory) / fit.slope_se : kNoValue;
        row.pass = std::abs(fit.slope - row.theory) <= plan.slope_tolerance;
        report.rows.push_back(row);

        bool decreasing = true;
        for (std::size_t k = 1; k < ly.size(); ++k) decreasing = decreasing && ly[k] < ly[k - 1];
        ReportRow mono{"coupling_decreasing", regime.case_index, plan.n_ladder.back(), t};
        mono.estimate = decreasing ? 1.0 : 0.0;
        mono.theory = 1.0;
        mono.pass = decreasing;
        report.rows.push_back(mono);
    }
    return report;
}

} // namespace tapered
