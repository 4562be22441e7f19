#include "tapered/errors.hpp"
#include "tapered/filters.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <doctest.h>

#include <cmath>

using namespace tapered;

TEST_CASE("zeta agrees with an independent implementation")
{
    CHECK(riemann_zeta(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-13));
    for (double s : {1.05, 1.2, 1.25, 1.5, 3.0}) {
        CHECK(riemann_zeta(s) == doctest::Approx(boost::math::zeta(s)).epsilon(1e-12));
    }
}

TEST_CASE("negative-dependence filters sum to zero")
{
    const auto f = FilterSpec::nd(1.25);
    CHECK(f.a0() == doctest::Approx(-riemann_zeta(1.25)));
    CHECK(f.total_sum() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(FilterSpec::srd(1.2).total_sum() == doctest::Approx(1.0 + riemann_zeta(1.2)));
}

TEST_CASE("coefficients and admissibility")
{
    const auto f = FilterSpec::lrd(0.7);
    CHECK(f.coefficient(0) == 1.0);
    CHECK(f.coefficient(8) == doctest::Approx(std::pow(8.0, -0.7)));
    CHECK(FilterSpec::constant().coefficient(12345) == 1.0);
    CHECK_THROWS(FilterSpec::lrd(1.2));
    CHECK_THROWS(FilterSpec::srd(0.9));
    CHECK(FilterSpec::lrd(0.7).stable_admissible(1.5));
    CHECK_FALSE(FilterSpec::lrd(0.6).stable_admissible(1.5));
}

TEST_CASE("truncation lags")
{
    CHECK(taper_lag(0.5, 1.0, 16384) == 128);
    CHECK(taper_lag(1.0, 2.5, 1000) == 2500);
    CHECK(taper_lag(1.0, 0.5, 1001) == 500);
    CHECK(taper_lag(0.5, 3.0, 10000) == 300);
    CHECK(classify_filter_taper(0.5) == FilterTaper::Strong);
    CHECK(classify_filter_taper(1.4) == FilterTaper::Weak);
    CHECK(classify_filter_taper(1.0) == FilterTaper::Moderate);
}

TEST_CASE("truncated filter and prefix sums")
{
    const TaperedFilter f(FilterSpec::srd(1.2), 0.5, 1.0, 100);
    CHECK(f.lag() == 10);
    CHECK(f.coefficient(11) == 0.0);
    CHECK(f.coefficient(-1) == 0.0);
    const auto p = f.prefix_sums();
    REQUIRE(p.size() == 11);
    double s = 0.0;
    for (long i = 0; i <= 10; ++i) s += f.coefficient(i);
    CHECK(p.back() == doctest::Approx(s));
    CHECK(f.abs_sum() == doctest::Approx(s));
    const auto id = TaperedFilter::with_lag(FilterSpec::lrd(0.7), 0, 10);
    CHECK(id.lag() == 0);
    CHECK(id.coefficient(0) == 1.0);
}
