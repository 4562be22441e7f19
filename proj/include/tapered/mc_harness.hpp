#pragma once

#include "tapered/limit_laws.hpp"
#include "tapered/partial_sums.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tapered {

enum class Check { Variance, Covariance, GaussianKS, StableCF, Lyapunov, Coupling };

struct ExperimentPlan {
    RegimeSpec regime;
    std::vector<long> n_ladder{1024, 4096, 16384};
    std::vector<double> t_grid{0.5, 1.0, 2.0};
    std::vector<double> theta_grid{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    std::size_t replicas = 1000;
    std::uint64_t master_seed = 1;
    std::set<Check> checks{Check::Variance, Check::Covariance, Check::GaussianKS, Check::StableCF};
    double threshold = 3.0;
    NormalizerKind normalizer = NormalizerKind::Exact;
    std::size_t bootstrap = 500;
    unsigned threads = 1;
    std::optional<double> delta{};    ///< Lyapunov order; case default when unset
    double slope_tolerance = 0.15;    ///< coupling slope band
    CouplingMethod coupling = CouplingMethod::Sparse;
    double max_draws = 1e9;           ///< stable checks refuse n * replicas above this

    void validate() const;
};

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct ReportRow {
    std::string check;
    int case_j = 0;
    long n = 0;
    double t = kNoValue;
    double s = kNoValue;
    double theta = kNoValue;
    double estimate = kNoValue;
    double std_error = kNoValue;
    double theory = kNoValue;
    double z = kNoValue;
    bool pass = false;
    double p_value = kNoValue;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;
    double threshold = 3.0;
    double required_fraction = 0.95;

    double pass_fraction() const;
    /// At least required_fraction of the rows pass.
    bool passed() const;
    void append(const ComparisonReport& other);
};

/// Z_n = S_n / A_n on the grid for replicas 0..R-1 of the seed; rows are replicas.
PathMatrix simulate_normalized_paths(const RegimeSpec& regime, long n, std::span<const double> t_grid,
                                     std::size_t replicas, std::uint64_t seed, unsigned threads = 1,
                                     NormalizerKind kind = NormalizerKind::Exact);

/// Variance, covariance, normality, mean and exact-variance rows against the Gaussian limit.
ComparisonReport run_gaussian_check(const ExperimentPlan& plan);

/// Empirical characteristic function against the stable limit, one t at a time
/// and jointly through the sum over the grid.
ComparisonReport run_stable_check(const ExperimentPlan& plan);

/// Lyapunov fraction over the ladder at each t, plus one slope row per t whose
/// pass flag is slope < 0.
ComparisonReport run_lyapunov_sweep(const ExperimentPlan& plan);

/// Coupling distance over the ladder at t_grid[0], plus a slope row compared with
/// (alpha - r)(1/alpha - gamma).
ComparisonReport run_coupling_check(const ExperimentPlan& plan, double r);

std::string to_string(Check c);
Check check_from_string(const std::string& s);

} // namespace tapered
