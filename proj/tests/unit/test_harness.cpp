#include "tapered/errors.hpp"
#include "tapered/mc_harness.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace tapered;

namespace {

ExperimentPlan small_plan(int j, RegimeOptions opt = {})
{
    ExperimentPlan plan{make_regime(j, opt)};
    plan.n_ladder = {256};
    plan.t_grid = {0.5, 1.0};
    plan.theta_grid = {-1.0, 1.0};
    plan.replicas = 200;
    plan.bootstrap = 50;
    return plan;
}

bool same_rows(const ComparisonReport& a, const ComparisonReport& b)
{
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        const auto& x = a.rows[k];
        const auto& y = b.rows[k];
        auto eq = [](double u, double v) { return (std::isnan(u) && std::isnan(v)) || u == v; };
        if (x.check != y.check || !eq(x.estimate, y.estimate) || !eq(x.std_error, y.std_error)) return false;
    }
    return true;
}

} // namespace

TEST_CASE("plan validation")
{
    auto plan = small_plan(8);
    plan.replicas = 50;
    CHECK_THROWS_AS(plan.validate(), UsageError);
    plan = small_plan(8);
    plan.theta_grid = {0.5, 1.0};
    CHECK_THROWS_AS(plan.validate(), UsageError);
    plan = small_plan(8);
    plan.t_grid = {1.0, 0.5};
    CHECK_THROWS_AS(plan.validate(), UsageError);
}

TEST_CASE("normalised paths are reproducible across thread counts")
{
    const RegimeSpec r = make_regime(4);
    const std::vector<double> grid{0.5, 1.0};
    const auto a = simulate_normalized_paths(r, 512, grid, 40, 7, 1);
    const auto b = simulate_normalized_paths(r, 512, grid, 40, 7, 3);
    CHECK(a.values == b.values);
}

TEST_CASE("gaussian check produces scored rows")
{
    auto plan = small_plan(8);
    const auto rep = run_gaussian_check(plan);
    REQUIRE_FALSE(rep.rows.empty());
    CHECK(std::any_of(rep.rows.begin(), rep.rows.end(), [](const ReportRow& r) { return r.check == "ks"; }));
    for (const auto& row : rep.rows) {
        if (row.check == "variance" || row.check == "mean") {
            CHECK(std::abs(row.z - (row.estimate - row.theory) / row.std_error) < 1e-12);
            CHECK(row.pass == (std::abs(row.z) <= plan.threshold));
        }
    }
    plan.threads = 2;
    CHECK(same_rows(rep, run_gaussian_check(plan)));
}

TEST_CASE("gaussian check rejects stable regimes and vice versa")
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::stable_pareto(1.5);
    CHECK_THROWS_AS(run_gaussian_check(small_plan(2, opt)), UsageError);
    CHECK_THROWS_AS(run_stable_check(small_plan(8)), UsageError);
}

TEST_CASE("stable check")
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::stable_pareto(1.5);
    auto plan = small_plan(2, opt);
    const auto rep = run_stable_check(plan);
    REQUIRE_FALSE(rep.rows.empty());
    for (const auto& row : rep.rows) {
        if (row.check == "cf_mod") {
            CHECK(row.theory == 0.0);
            CHECK(row.estimate >= 0.0);
        }
    }
    plan.max_draws = 1000.0;
    CHECK_THROWS_AS(run_stable_check(plan), SizeError);
}

TEST_CASE("Lyapunov sweep needs a ladder")
{
    auto plan = small_plan(2);
    plan.t_grid = {1.0};
    CHECK_THROWS_AS(run_lyapunov_sweep(plan), UsageError);
    plan.n_ladder = {1000, 4000, 16000};
    const auto rep = run_lyapunov_sweep(plan);
    const auto slope = std::find_if(rep.rows.begin(), rep.rows.end(),
                                    [](const ReportRow& r) { return r.check == "lyapunov_slope"; });
    REQUIRE(slope != rep.rows.end());
    CHECK(slope->pass);
    CHECK(slope->estimate == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("coupling check needs soft tapering")
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::stable_tapered(1.5, TaperLevel::growing(1.0 / 1.5));
    auto plan = small_plan(2, opt);
    plan.n_ladder = {1000, 10000};
    CHECK_THROWS_AS(run_coupling_check(plan, 1.0), UsageError);
}

TEST_CASE("check names round trip")
{
    for (Check c : {Check::Variance, Check::Covariance, Check::GaussianKS, Check::StableCF, Check::Lyapunov,
                    Check::Coupling}) {
        CHECK(check_from_string(to_string(c)) == c);
    }
    CHECK_THROWS_AS(check_from_string("nope"), UsageError);
}

TEST_CASE("report pass fraction")
{
    ComparisonReport rep;
    for (int k = 0; k < 20; ++k) rep.rows.push_back(ReportRow{.check = "x", .pass = k != 0});
    CHECK(rep.pass_fraction() == doctest::Approx(0.95));
    CHECK(rep.passed());
    rep.rows[1].pass = false;
    CHECK_FALSE(rep.passed());
}
