#include "tapered/errors.hpp"
#include "tapered/innovations.hpp"
#include "tapered/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace tapered;

TEST_CASE("tail index and taper levels")
{
    CHECK_THROWS_AS(TailIndex(1.0), DomainError);
    CHECK_THROWS_AS(TailIndex(2.0), DomainError);
    CHECK(TailIndex(1.5).has_mean());
    CHECK_FALSE(TailIndex(0.8).has_mean());
    CHECK(TaperLevel::growing(0.5).at(10000) == doctest::Approx(100.0));
    CHECK(TaperLevel::fixed(3.0).at(10) == 3.0);
    CHECK(std::isinf(TaperLevel::none().at(10)));
}

TEST_CASE("hard, soft and intermediate tapering")
{
    CHECK(classify_innovation_taper(1.5, 0.4) == InnovationTaper::Hard);
    CHECK(classify_innovation_taper(1.5, 1.0) == InnovationTaper::Soft);
    CHECK(classify_innovation_taper(1.5, 2.0 / 3.0) == InnovationTaper::Intermediate);
}

TEST_CASE("inverse-cdf samplers")
{
    CHECK(sample_pareto(2.0, 0.25) == doctest::Approx(2.0));
    CHECK(sample_tapered_pareto(2.0, 5.0, 0.25, 0.5) == doctest::Approx(2.0));
    CHECK(sample_tapered_pareto(2.0, 1.5, 0.25, std::exp(-0.75)) == doctest::Approx(2.25));
    // alpha = 1 is a valid sampler input even though limit theory excludes it
    CHECK(sample_pareto(1.0, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("tapered moments in closed form")
{
    // b = 1 leaves only 1 + R with R ~ Exp(1)
    CHECK(tapered_moment(1.5, 1.0, 2.0) == doctest::Approx(5.0).epsilon(1e-10));
    CHECK(tapered_central_abs_moment(1.5, 1.0, 3.0) == doctest::Approx(12.0 / std::exp(1.0) - 2.0).epsilon(1e-8));
    // alpha (1 - b^{1-alpha}) / (alpha - 1) + b^{-alpha} (b + 1)
    CHECK(tapered_moment(1.5, 5.0, 1.0) == doctest::Approx(2.1950155281).epsilon(1e-9));
    // alpha (b^{2-alpha} - 1) / (2 - alpha) + b^{-alpha} E(b + R)^2
    CHECK(tapered_moment(1.5, 5.0, 2.0) == doctest::Approx(7.0175845392).epsilon(1e-9));
    CHECK(pareto_moment(1.5, 1.0) == doctest::Approx(3.0));
    CHECK(pareto_moment(1.5, 0.5) == doctest::Approx(1.5));
}

TEST_CASE("sampled tapered moments agree with the closed forms")
{
    Rng rng(17, Purpose::Auxiliary, 0);
    std::vector<double> z(200000);
    for (auto& v : z) v = sample_tapered_pareto(1.5, 5.0, rng.uniform(), rng.uniform());
    const double m = stats::mean(z);
    const double se = std::sqrt(stats::variance(z) / static_cast<double>(z.size()));
    CHECK(std::abs(m - tapered_moment(1.5, 5.0, 1.0)) < 4.0 * se);
    const auto ks = stats::ks_one_sample(z, [](double x) {
        if (x < 1.0) return 0.0;
        if (x < 5.0) return 1.0 - std::pow(x, -1.5);
        return 1.0 - std::pow(5.0, -1.5) * std::exp(-(x - 5.0));
    });
    CHECK(ks.p_value > 0.001);
}

TEST_CASE("innovation moments follow the kind")
{
    const auto g = innovation_moments(InnovationSpec::gaussian(), 100);
    CHECK(g.mean == 0.0);
    CHECK(g.variance == 1.0);
    const auto spec = InnovationSpec::centered_tapered(1.5, TaperLevel::growing(0.4));
    const auto m = innovation_moments(spec, 1000);
    const double b = std::pow(1000.0, 0.4);
    CHECK(m.mean == doctest::Approx(tapered_moment(1.5, b, 1.0)));
    CHECK(m.variance == doctest::Approx(tapered_moment(1.5, b, 2.0) - m.mean * m.mean).epsilon(1e-9));

    Rng rng(4, Purpose::Innovations, 0);
    std::vector<double> eta(100000);
    draw_innovations(spec, 1000, rng, eta);
    CHECK(std::abs(stats::mean(eta)) < 4.0 * std::sqrt(m.variance / 1e5));
}

TEST_CASE("raw and tapered draws share uniforms")
{
    Rng r1(8, Purpose::Innovations, 3);
    Rng r2(8, Purpose::Innovations, 3);
    std::vector<double> raw(5000), tap(5000);
    draw_innovations(InnovationSpec::pareto(1.5), 100, r1, raw);
    draw_innovations(InnovationSpec::tapered(1.5, TaperLevel::fixed(4.0)), 100, r2, tap);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k] < 4.0) REQUIRE(tap[k] == raw[k]);
        else REQUIRE(tap[k] >= 4.0);
    }
}

TEST_CASE("moment ratio stays below its bound and coupling decay exponents")
{
    const auto r = moment_ratio_bound_check(1.5, 0.4, 10000, 1.0);
    CHECK(r.ratio <= r.bound);
    CHECK(coupling_moment_decay(1.5, 1.0) == doctest::Approx(0.5));
    CHECK(coupling_moment_decay(0.8, 0.5) == doctest::Approx(0.3));
}
