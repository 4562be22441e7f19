#include "tapered/errors.hpp"
#include "tapered/partial_sums.hpp"
#include "tapered/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace tapered;

namespace {

std::vector<double> random_array(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed, Purpose::Auxiliary, 0);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

} // namespace

TEST_CASE("steps guards representation error")
{
    CHECK(steps(10, 0.3) == 3);
    CHECK(steps(100, 0.29) == 29);
    CHECK(steps(1000, 0.0) == 0);
}

TEST_CASE("partial sums agree across routes and with the coefficient profile")
{
    const long n = 200;
    const std::vector<double> grid{0.25, 0.5, 1.0, 1.5};
    for (int j : {1, 4, 8, 9}) {
        const RegimeSpec regime = make_regime(j);
        const TaperedFilter filter = regime.filter_at(n);
        const long lag = filter.lag();
        const long mmax = steps(n, grid.back());
        const auto eta = random_array(static_cast<std::size_t>(mmax + lag + 1), 30 + j);

        const auto direct = partial_sums_from_innovations(filter, grid, eta, PathMethod::Direct);
        const auto fft = partial_sums_from_innovations(filter, grid, eta, PathMethod::Fft);
        const auto x = process_values(filter, eta, mmax);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const long m = steps(n, grid[g]);
            double cum = 0.0;
            for (long k = 0; k < m; ++k) cum += x[static_cast<std::size_t>(k)];
            const auto prof = coefficient_profile(filter, grid[g]);
            double dot = 0.0;
            for (long i = prof.i_min; i <= prof.i_max(); ++i) dot += prof.at(i) * eta[static_cast<std::size_t>(i + lag)];
            const double tol = 1e-9 * (1.0 + std::abs(cum));
            CHECK(std::abs(direct[g] - cum) < tol);
            CHECK(std::abs(fft[g] - cum) < tol);
            CHECK(std::abs(dot - cum) < tol);
        }
    }
}

TEST_CASE("engine matches the free function and is deterministic")
{
    const RegimeSpec regime = make_regime(5);
    const std::vector<double> grid{0.5, 1.0};
    const PathEngine fft(regime, 300, grid, PathMethod::Fft);
    const PathEngine direct(regime, 300, grid, PathMethod::Direct);
    const auto a = fft.simulate(12, 4);
    const auto b = direct.simulate(12, 4);
    const auto c = fft.simulate(12, 4);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        CHECK(a[g] == doctest::Approx(b[g]).epsilon(1e-10));
        CHECK(a[g] == c[g]);
    }
}

TEST_CASE("exact variance with the identity filter")
{
    const auto f = TaperedFilter::with_lag(FilterSpec::lrd(0.7), 0, 1000);
    const auto prof = coefficient_profile(f, 0.5);
    CHECK(exact_variance(prof) == doctest::Approx(500.0));
    CHECK(exact_variance(prof, 2.0) == doctest::Approx(1000.0));
}

TEST_CASE("finite-n variance and covariance oracles")
{
    const long n = 10000;
    const RegimeSpec r4 = make_regime(4);
    const double a4 = normalizer(r4, n).value;
    CHECK(exact_variance(coefficient_profile(r4, n, 0.5)) / (a4 * a4) ==
          doctest::Approx(std::pow(0.5, 1.6)).epsilon(0.03));

    const RegimeSpec r8 = make_regime(8);
    const double a8 = normalizer(r8, n).value;
    CHECK(exact_variance(coefficient_profile(r8, n, 1.0)) / (a8 * a8) == doctest::Approx(1.0).epsilon(0.02));
    const double cov = exact_covariance(coefficient_profile(r8, n, 0.5), coefficient_profile(r8, n, 1.0));
    CHECK(cov / (a8 * a8) == doctest::Approx(0.5).epsilon(0.05));

    const auto split = variance_split(coefficient_profile(r8, n, 1.0));
    CHECK(split.non_positive + split.positive == doctest::Approx(a8 * a8));
}

TEST_CASE("normalisers")
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::stable_pareto(1.5);
    const RegimeSpec s2 = make_regime(2, opt);
    CHECK(normalizer(s2, 1000).value == doctest::Approx(100.0));
    const RegimeSpec s7 = make_regime(7, opt);
    CHECK(normalizer(s7, 1000).value == doctest::Approx(std::pow(1000.0, 1.0 / 1.5 + 0.3)));
    const RegimeSpec g10 = make_regime(10);
    CHECK(asymptotic_gaussian_norm_sq(g10, 100) == doctest::Approx(std::pow(100.0, 2.0)));
    const RegimeSpec g12 = make_regime(12);
    CHECK(asymptotic_gaussian_norm_sq(g12, 100) == doctest::Approx(2.0 / 3.0 * 1e6));

    RegimeOptions hard;
    hard.innovation = InnovationSpec::centered_tapered(1.5, TaperLevel::growing(0.4));
    const RegimeSpec h8 = make_regime(8, hard);
    const RegimeSpec g8 = make_regime(8);
    const auto scaled = normalizer(h8, 1000);
    CHECK(scaled.innovation_scaled);
    CHECK(scaled.value == doctest::Approx(normalizer(g8, 1000).value *
                                          std::sqrt(innovation_moments(hard.innovation, 1000).variance)));
}

TEST_CASE("regime validation")
{
    CHECK_THROWS_AS(make_regime(13), UsageError);
    CHECK_THROWS(make_regime(7, {1.2}));
    RegimeOptions soft;
    soft.innovation = InnovationSpec::stable_tapered(1.5, TaperLevel::growing(1.0));
    CHECK(make_regime(2, soft).family() == LimitFamily::Stable);
    RegimeOptions raw;
    raw.innovation = InnovationSpec::pareto(1.5);
    CHECK_THROWS_AS(make_regime(2, raw), UsageError);
}

TEST_CASE("Lyapunov fractions")
{
    const RegimeSpec r = make_regime(2);
    const double l1 = lyapunov_fraction(r, 1000, 1.0, 1.0);
    const double l2 = lyapunov_fraction(r, 4000, 1.0, 1.0);
    CHECK(l2 < l1);
    CHECK(std::log(l2 / l1) / std::log(4.0) == doctest::Approx(-0.5).epsilon(0.1));
    const RegimeSpec nd = make_regime(3, {1.4});
    CHECK(lyapunov_delta_bound(nd) == doctest::Approx(0.5));
    CHECK_THROWS_AS(lyapunov_fraction(nd, 1000, 1.0, 0.6), UsageError);
    CHECK(default_lyapunov_delta(nd) == doctest::Approx(0.25));
}

TEST_CASE("coupling distance preconditions")
{
    RegimeOptions hard;
    hard.innovation = InnovationSpec::centered_tapered(1.5, TaperLevel::growing(0.4));
    CHECK_THROWS_AS(coupling_distance(make_regime(2, hard), 1000, 1.0, 1.0, 100, 1), UsageError);

    RegimeOptions soft;
    soft.innovation = InnovationSpec::stable_tapered(1.5, TaperLevel::growing(1.0));
    const RegimeSpec r = make_regime(2, soft);
    const auto sparse = coupling_distance(r, 1000, 1.0, 1.0, 20000, 3, CouplingMethod::Sparse);
    const auto full = coupling_distance(r, 1000, 1.0, 1.0, 20000, 3, CouplingMethod::Full);
    CHECK(sparse.estimate > 0.0);
    CHECK(std::abs(sparse.estimate - full.estimate) <
          4.0 * std::hypot(sparse.std_error, full.std_error));
}
