#include "tapered/stats.hpp"

#include "tapered/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tapered::stats {

void Accumulator::add(double x)
{
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

double sum(std::span<const double> x)
{
    Accumulator acc;
    for (double v : x) acc.add(v);
    return acc.value();
}

double mean(std::span<const double> x)
{
    if (x.empty()) throw UsageError("mean of an empty sample");
    return sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x)
{
    if (x.size() < 2) throw UsageError("variance needs at least two observations");
    const double m = mean(x);
    Accumulator acc;
    for (double v : x) acc.add((v - m) * (v - m));
    return acc.value() / static_cast<double>(x.size() - 1);
}

double covariance(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw UsageError("covariance needs paired samples");
    const double mx = mean(x);
    const double my = mean(y);
    Accumulator acc;
    for (std::size_t i = 0; i < x.size(); ++i) acc.add((x[i] - mx) * (y[i] - my));
    return acc.value() / static_cast<double>(x.size() - 1);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double kolmogorov_survival(double lambda)
{
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // small-lambda form of the theta series
        const double pi = 3.14159265358979323846;
        const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
        double s = 0.0;
        for (int k = 1; k < 40; k += 2) s += std::pow(y, k * k);
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k < 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-300) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf)
{
    if (x.empty()) throw UsageError("KS test on an empty sample");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d)};
}

KsResult ks_normal(std::span<const double> x, double mu, double sd)
{
    if (!(sd > 0.0)) throw UsageError("KS normal reference needs positive sd");
    return ks_one_sample(x, [&](double v) { return normal_cdf((v - mu) / sd); });
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y)
{
    if (x.empty() || y.empty()) throw UsageError("KS test on an empty sample");
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> b(y.begin(), y.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double bootstrap_sd(std::size_t n, std::size_t resamples, Rng& rng,
                    const std::function<double(std::span<const std::size_t>)>& statistic)
{
    if (n == 0 || resamples < 2) throw UsageError("bootstrap needs data and at least two resamples");
    std::vector<std::size_t> idx(n);
    std::vector<double> stat(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (auto& k : idx) k = static_cast<std::size_t>(rng.below(n));
        stat[b] = statistic(idx);
    }
    return std::sqrt(variance(stat));
}

LineFit ols(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw UsageError("line fit needs two or more points");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw UsageError("line fit needs distinct abscissae");
    const double slope = sxy / sxx;
    const double icept = my - slope * mx;
    double se = 0.0;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - icept - slope * x[i];
            rss += r * r;
        }
        se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    }
    return {slope, icept, se};
}

} // namespace tapered::stats
