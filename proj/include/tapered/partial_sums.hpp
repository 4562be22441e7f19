#pragma once

#include "tapered/filters.hpp"
#include "tapered/innovations.hpp"
#include "tapered/limit_laws.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tapered {

enum class LimitFamily { Gaussian, Stable, None };

/// Case j in 1..12 together with the filter family, its truncation exponents and
/// the innovation law. The truncated filter itself depends on n (see filter_at).
struct RegimeSpec {
    int case_index;
    FilterSpec filter;
    double gamma1;
    double c;
    InnovationSpec innovation;

    TaperedFilter filter_at(long n) const { return TaperedFilter(filter, gamma1, c, n); }
    LimitFamily family() const;
    Dependence dependence() const;
    FilterTaper taper() const;
    /// Throws when j, the filter, the truncation and the innovation law disagree.
    void validate() const;

    GaussianLimit gaussian_law() const;
    StableLimit stable_law() const;
};

/// Optional overrides for make_regime; unset fields take the case defaults
/// (beta 0.7 / 1.2 / 1.25 for LRD / SRD / ND, gamma1 0.5 / 1.4 / 1, c = 1).
struct RegimeOptions {
    std::optional<double> beta;
    std::optional<double> gamma1;
    double c = 1.0;
    InnovationSpec innovation = InnovationSpec::gaussian();
};

RegimeSpec make_regime(int j, const RegimeOptions& opt = {});

Dependence case_dependence(int j);
FilterTaper case_taper(int j);
double default_beta(int j);
double default_gamma1(int j);

/// floor(n t), guarded against representation error.
long steps(long n, double t);

struct CoefficientProfile {
    long n = 0;
    double t = 0.0;
    long lag = 0;
    long i_min = 0; ///< -lag
    std::vector<double> values; ///< d_{i}, i = i_min .. i_min + size - 1

    long i_max() const { return i_min + static_cast<long>(values.size()) - 1; }
    double at(long i) const;
};

CoefficientProfile coefficient_profile(const TaperedFilter& filter, double t);
CoefficientProfile coefficient_profile(const RegimeSpec& regime, long n, double t);

double exact_variance(const CoefficientProfile& profile, double innovation_var = 1.0);
double exact_covariance(const CoefficientProfile& p1, const CoefficientProfile& p2, double innovation_var = 1.0);

struct VarianceSplit {
    double non_positive; ///< sum over i <= 0
    double positive;     ///< sum over i >= 1
};
VarianceSplit variance_split(const CoefficientProfile& profile);

enum class NormalizerKind { Exact, Asymptotic };

struct Normalizer {
    int case_index;
    long n;
    double value;
    bool innovation_scaled;
    NormalizerKind kind;
};

/// Squared Gaussian normaliser from the closed-form growth rates.
double asymptotic_gaussian_norm_sq(const RegimeSpec& regime, long n);

/// Gaussian families: A_n^2 = Var S_n(1) for unit innovations (Exact) or the closed
/// form (Asymptotic), times the innovation variance for tapered Pareto input.
/// Stable families: n^{1/alpha} z_n.
Normalizer normalizer(const RegimeSpec& regime, long n, NormalizerKind kind = NormalizerKind::Exact);

enum class PathMethod { Auto, Direct, Fft };

/// Partial sums S_n(t_k) of X_k = sum_j a_j eta_{k-j} for a fixed innovation array
/// with innovations[p] = eta_{p - lag}; its length must be steps(n, max t) + lag + 1.
std::vector<double> partial_sums_from_innovations(const TaperedFilter& filter, std::span<const double> t_grid,
                                                  std::span<const double> innovations,
                                                  PathMethod method = PathMethod::Auto);

/// X_1 .. X_count for the same innovation layout.
std::vector<double> process_values(const TaperedFilter& filter, std::span<const double> innovations, long count);

/// Precomputed state for repeated path simulation at fixed (regime, n, grid).
class PathEngine {
public:
    PathEngine(const RegimeSpec& regime, long n, std::vector<double> t_grid, PathMethod method = PathMethod::Auto);
    ~PathEngine();
    PathEngine(const PathEngine&) = delete;
    PathEngine& operator=(const PathEngine&) = delete;

    std::size_t innovation_count() const { return count_; }
    const TaperedFilter& filter() const { return filter_; }
    PathMethod method() const { return method_; }

    /// One path of S_n on the grid for replica `replica` of `seed`.
    std::vector<double> simulate(std::uint64_t seed, std::uint64_t replica) const;
    std::vector<double> from_innovations(std::span<const double> innovations) const;

    struct Fft;

private:
    RegimeSpec regime_;
    long n_;
    std::vector<double> grid_;
    std::vector<long> steps_;
    TaperedFilter filter_;
    std::vector<double> prefix_;
    std::size_t count_;
    PathMethod method_;
    Fft* fft_ = nullptr;
};

std::vector<double> simulate_partial_sum_path(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                              std::uint64_t seed, std::uint64_t replica = 0);

/// Z_n on the grid: the path divided by normalizer(regime, n).
std::vector<double> normalized_process(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                       std::uint64_t seed, std::uint64_t replica = 0);

/// Largest admissible Lyapunov order for the case (strict bound for ND filters).
double lyapunov_delta_bound(const RegimeSpec& regime);
/// Default order: 1, or min(1, (3-2beta)/(2(beta-1))) for ND filters.
double default_lyapunov_delta(const RegimeSpec& regime);

double lyapunov_fraction(const RegimeSpec& regime, long n, double t, double delta);

struct MeanEstimate {
    double estimate;
    double std_error;
};

enum class CouplingMethod { Sparse, Full };

/// Monte Carlo E|V_n(t) - Z_n(t)|^r for soft-tapered Pareto innovations coupled
/// with the raw Pareto innovations on identical uniforms.
MeanEstimate coupling_distance(const RegimeSpec& regime, long n, double t, double r, std::size_t replicas,
                               std::uint64_t seed, CouplingMethod method = CouplingMethod::Sparse,
                               unsigned threads = 1);

} // namespace tapered
