#pragma once

#include "tapered/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tapered::stats {

/// Compensated (Neumaier) summation.
class Accumulator {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double sum(std::span<const double> x);
double mean(std::span<const double> x);
/// Unbiased sample variance.
double variance(std::span<const double> x);
double covariance(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample KS against N(mu, sd^2).
KsResult ks_normal(std::span<const double> x, double mu, double sd);
/// One-sample KS against an arbitrary continuous cdf.
KsResult ks_one_sample(std::span<const double> x, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

/// Standard deviation of a statistic over nonparametric bootstrap resamples.
/// The statistic receives the resampled indices.
double bootstrap_sd(std::size_t n, std::size_t resamples, Rng& rng,
                    const std::function<double(std::span<const std::size_t>)>& statistic);

struct LineFit {
    double slope;
    double intercept;
    double slope_se;
};

LineFit ols(std::span<const double> x, std::span<const double> y);

} // namespace tapered::stats
