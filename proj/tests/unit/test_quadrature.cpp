#include "tapered/errors.hpp"
#include "tapered/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace tapered;

TEST_CASE("smooth integrals")
{
    CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(quad::integrate([](double x) { return x * x; }, 2.0, 2.0) == 0.0);
}

TEST_CASE("endpoint singularities")
{
    auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
    CHECK(quad::integrate_singular(inv_sqrt, 0.0, 1.0, -0.5, 0.0) == doctest::Approx(2.0).epsilon(1e-10));
    auto both = [](double x) { return std::pow(x, -0.3) * std::pow(1.0 - x, -0.6); };
    // Beta(0.7, 0.4)
    const double b = std::tgamma(0.7) * std::tgamma(0.4) / std::tgamma(1.1);
    CHECK(quad::integrate_singular(both, 0.0, 1.0, -0.3, -0.6) == doctest::Approx(b).epsilon(1e-9));
    auto frac = [](double x) { return std::pow(x, 0.3); };
    CHECK(quad::integrate_singular(frac, 0.0, 1.0, 0.3, 0.0) == doctest::Approx(1.0 / 1.3).epsilon(1e-12));
    CHECK_THROWS_AS(quad::integrate_singular(inv_sqrt, 0.0, 1.0, -1.0, 0.0), DomainError);
}

TEST_CASE("tail integrals")
{
    CHECK(quad::integrate_tail([](double x) { return 1.0 / (x * x); }, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(quad::integrate_tail([](double x) { return std::pow(x, -2.4); }, 3.0, 2.4) ==
          doctest::Approx(std::pow(3.0, -1.4) / 1.4).epsilon(1e-10));
}

TEST_CASE("piecewise integration across kinks and a jump")
{
    auto f = [](double x) { return x < 0.0 ? 1.0 : (x < 1.0 ? std::pow(x, 0.5) : 0.0); };
    const double v = quad::integrate_piecewise(f, {{-1.0}, {0.0, 0.5}, {1.0}, {2.0}});
    CHECK(v == doctest::Approx(1.0 + 2.0 / 3.0).epsilon(1e-10));
}
