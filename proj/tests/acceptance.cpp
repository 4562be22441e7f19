// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: acceptance [k ...]   (no arguments runs all eleven)

#include "tapered/cli.hpp"
#include "tapered/errors.hpp"
#include "tapered/limit_laws.hpp"
#include "tapered/mc_harness.hpp"
#include "tapered/parallel.hpp"
#include "tapered/partial_sums.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace tapered;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

unsigned threads()
{
    return resolve_threads(0);
}

// 1. Exact variance over the default normaliser against W(t), 3% band. The
// closed-form normaliser ratio at t = 1 is reported alongside.
Outcome exact_variance_oracle()
{
    const long n = 1L << 14;
    double worst = 0.0;
    std::string where, fails, closed;
    for (int j = 1; j <= 12; ++j) {
        const RegimeSpec regime = make_regime(j);
        const GaussianLimit law = regime.gaussian_law();
        const double a = normalizer(regime, n).value;
        for (double t : {0.5, 1.0, 2.0}) {
            const double sd2 = exact_variance(coefficient_profile(regime, n, t));
            const double ratio = sd2 / (a * a) / law.variance(t);
            const double err = std::abs(ratio - 1.0);
            if (err > 0.03) fails += " j=" + std::to_string(j) + ",t=" + fmt("%g", t) + ":" + fmt("%.4f", ratio);
            if (err > worst) {
                worst = err;
                where = "j=" + std::to_string(j) + " t=" + fmt("%g", t);
            }
            if (t == 1.0) closed += " " + fmt("%.3f", sd2 / asymptotic_gaussian_norm_sq(regime, n));
        }
    }
    std::string d = "max |ratio-1| = " + fmt("%.4f", worst) + " at " + where;
    if (!fails.empty()) d += "; outside 3%:" + fails;
    d += "; closed-form A_n^2 ratios at t=1, j=1..12:" + closed;
    return {fails.empty(), d};
}

// 2. C9 and C16 agree across the t = c split.
Outcome constant_continuity()
{
    Rng rng(20240611, Purpose::Auxiliary, 2);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double c = 0.2 + 4.8 * rng.uniform();
        const double b_lrd = 0.5 + 0.5 * rng.uniform();
        const double b_nd = 1.0 + 0.5 * rng.uniform();
        worst = std::max(worst, std::abs(constant_C(9, c, b_lrd, c, Branch::Inner) -
                                         constant_C(9, c, b_lrd, c, Branch::Outer)));
        worst = std::max(worst, std::abs(constant_C(16, c, b_nd, c, Branch::Inner) -
                                         constant_C(16, c, b_nd, c, Branch::Outer)));
    }
    return {worst <= 1e-8, "max jump = " + fmt("%.3e", worst)};
}

// 3. Closed forms reproduced by the quadrature-backed constants.
Outcome closed_forms()
{
    const double c3 = constant_C(3, 1.0, 0.5, 1.0);
    const double c18 = constant_C(18, 1.0, 0.0, 1.0);
    double c1 = 0.0;
    for (double beta : {0.6, 0.7, 0.9}) {
        for (double c : {0.5, 1.0, 2.5}) c1 = std::max(c1, std::abs(constant_C(1, c, beta, c)));
    }
    const double worst = std::max({std::abs(c3 - 2.0), std::abs(c18 - 2.0 / 3.0), c1});
    return {worst <= 1e-8, "C3(1/2) = " + fmt("%.15g", c3) + ", C18(1) = " + fmt("%.15g", c18) +
                               ", max |C1(c)| = " + fmt("%.3e", c1)};
}

// 4. Two-point log slopes of the TFBM variance near 0 and near infinity.
Outcome tfbm_slopes()
{
    bool ok = true;
    std::string d;
    for (double beta : {0.6, 0.7, 0.8}) {
        const double H = 1.5 - beta;
        auto v = [&](double t) { return tf3_covariance(H, 1.0, t, t, 1.0); };
        const double small = std::log(v(1e-2) / v(1e-3)) / std::log(10.0);
        const double large = std::log(v(1e3) / v(1e2)) / std::log(10.0);
        const bool s_ok = std::abs(small - (3.0 - 2.0 * beta)) <= 0.02;
        const bool l_ok = std::abs(large - 1.0) <= 0.02;
        ok = ok && s_ok && l_ok;
        d += "beta=" + fmt("%g", beta) + ": small " + fmt("%.4f", small) + " (want " + fmt("%g", 3.0 - 2.0 * beta) +
             (s_ok ? ")" : ", out)") + ", large " + fmt("%.4f", large) + (l_ok ? "" : " (out)") + "; ";
    }
    return {ok, d};
}

// Shared verdict for criteria 5 and 6.
Outcome gaussian_verdict(const std::vector<ExperimentPlan>& plans)
{
    bool ok = true;
    std::string d;
    for (const auto& plan : plans) {
        const auto report = run_gaussian_check(plan);
        double worst_z = 0.0, ks_p = NAN;
        for (const auto& r : report.rows) {
            if (r.check == "variance") {
                worst_z = std::max(worst_z, std::abs(r.z));
                ok = ok && r.pass;
            }
            if (r.check == "ks" && r.t == 1.0) {
                ks_p = r.p_value;
                ok = ok && r.pass;
            }
        }
        d += "j=" + std::to_string(plan.regime.case_index) + ": max |z| " + fmt("%.2f", worst_z) + ", KS p(t=1) " +
             fmt("%.3f", ks_p) + "; ";
    }
    return {ok, d};
}

ExperimentPlan gaussian_plan(const RegimeSpec& regime)
{
    ExperimentPlan plan{regime};
    plan.n_ladder = {1L << 14};
    plan.t_grid = {0.5, 1.0, 2.0};
    plan.replicas = 4000;
    plan.master_seed = 5;
    plan.checks = {Check::Variance, Check::GaussianKS};
    plan.threads = threads();
    return plan;
}

// 5. Gaussian input, j = 8 and j = 4.
Outcome gaussian_mc()
{
    return gaussian_verdict({gaussian_plan(make_regime(8)), gaussian_plan(make_regime(4))});
}

// 6. Hard-tapered Pareto input behaves like Gaussian input.
Outcome hard_taper()
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::centered_tapered(1.5, TaperLevel::growing(0.4));
    auto plan = gaussian_plan(make_regime(8, opt));
    plan.master_seed = 6;
    return gaussian_verdict({plan});
}

// 7. Lyapunov fractions decay for all nine cases.
Outcome lyapunov_decay()
{
    bool ok = true;
    std::string d;
    for (int j = 1; j <= 9; ++j) {
        ExperimentPlan plan{make_regime(j)};
        plan.n_ladder = {1L << 10, 1L << 12, 1L << 14};
        plan.t_grid = {1.0};
        if (j == 2) plan.delta = 1.0;
        const auto report = run_lyapunov_sweep(plan);
        const auto& slope = report.rows.back();
        ok = ok && slope.pass;
        if (j == 2) ok = ok && std::abs(slope.estimate + 0.5) <= 0.1;
        d += "j" + std::to_string(j) + " " + fmt("%.3f", slope.estimate) + (j < 9 ? ", " : "");
    }
    return {ok, "slopes: " + d};
}

// 8. Empirical characteristic function against the stable limit.
Outcome stable_cf()
{
    bool ok = true;
    std::string d;
    for (int j : {2, 7}) {
        RegimeOptions opt;
        opt.innovation = InnovationSpec::stable_pareto(1.5);
        ExperimentPlan plan{make_regime(j, opt)};
        plan.n_ladder = {10000};
        plan.t_grid = {1.0};
        plan.theta_grid = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
        plan.replicas = 10000;
        plan.master_seed = 8;
        plan.checks = {Check::StableCF};
        plan.threads = threads();
        const auto report = run_stable_check(plan);
        double worst = 0.0;
        for (const auto& r : report.rows) {
            if (r.check != "cf_mod") continue;
            worst = std::max(worst, r.z);
            ok = ok && r.pass;
        }
        d += "j=" + std::to_string(j) + ": max |cf diff|/se " + fmt("%.2f", worst) + "; ";
    }
    return {ok, d};
}

// 9. Coupling distance decays at the predicted rate.
Outcome coupling()
{
    RegimeOptions opt;
    opt.innovation = InnovationSpec::stable_tapered(1.5, TaperLevel::growing(1.0));
    ExperimentPlan plan{make_regime(2, opt)};
    plan.n_ladder = {1000, 10000, 100000};
    plan.t_grid = {1.0};
    plan.replicas = 1000000;
    plan.master_seed = 9;
    plan.threads = threads();
    const auto report = run_coupling_check(plan, 1.0);
    bool ok = true;
    std::string d = "E|V-Z|:";
    for (const auto& r : report.rows) {
        if (r.check == "coupling") d += " " + fmt("%.4g", r.estimate);
        if (r.check == "coupling_slope") {
            d += "; slope " + fmt("%.4f", r.estimate) + " vs " + fmt("%.4f", r.theory);
            ok = ok && r.pass;
        }
        if (r.check == "coupling_decreasing") ok = ok && r.pass;
    }
    return {ok, d};
}

// 10. Scaled coefficients approach the moderate-taper kernel.
Outcome kernel_bridge()
{
    const long n = 100000;
    const double beta = 0.7, c = 1.0, t = 1.0;
    const RegimeSpec regime = make_regime(7, {beta, 1.0, c, InnovationSpec::gaussian()});
    const auto prof = coefficient_profile(regime, n, t);
    double worst = 0.0;
    for (double u : {-0.9, -0.5, 0.1, 0.5, 0.9}) {
        const long i = static_cast<long>(std::floor(static_cast<double>(n) * u));
        const double scaled = std::pow(static_cast<double>(n), beta - 1.0) * prof.at(i);
        const double h = moderate_kernel(u, t, beta, c);
        worst = std::max(worst, std::abs(scaled / h - 1.0));
    }
    return {worst <= 0.05, "max relative gap = " + fmt("%.4f", worst)};
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args)
{
    std::vector<const char*> argv{"tapered"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

// 11. Same seed, different thread counts, identical bytes.
Outcome determinism()
{
    const std::vector<std::vector<std::string>> runs{
        {"verify", "gaussian", "--j", "8", "--n", "1024,4096", "--replicas", "400", "--seed", "11"},
        {"verify", "stable", "--j", "2", "--alpha", "1.5", "--n", "2000", "--t", "0.5,1", "--replicas", "400",
         "--seed", "11"},
        {"verify", "coupling", "--j", "2", "--alpha", "1.5", "--gamma", "1", "--n", "1000,10000", "--replicas",
         "20000", "--seed", "11"},
        {"simulate", "zn", "--j", "4", "--n", "1024", "--replicas", "16", "--seed", "11"},
        {"simulate", "tfsm3", "--H", "0.9", "--alpha", "1.5", "--grid", "0:0.25:2", "--replicas", "16", "--seed", "11"},
        {"simulate", "tfbm3", "--H", "0.8", "--grid", "0:0.05:2", "--replicas", "8", "--seed", "11", "--format",
         "jsonl"},
    };
    bool ok = true;
    std::string d;
    int k = 0;
    for (const auto& base : runs) {
        std::string first;
        for (const char* th : {"1", "3", "8"}) {
            const std::string path = "determinism_" + std::to_string(k) + "_" + th + ".out";
            auto args = base;
            args.insert(args.end(), {"--threads", th, "--output", path});
            const int code = cli(args);
            if (code != 0 && code != 1) {
                ok = false;
                d += base[1] + " exited " + std::to_string(code) + "; ";
            }
            const std::string body = slurp(path);
            std::remove(path.c_str());
            if (body.empty()) ok = false;
            if (first.empty()) {
                first = body;
            } else if (body != first) {
                ok = false;
                d += base[0] + " " + base[1] + " differs at " + th + " threads; ";
            }
        }
        ++k;
    }
    return {ok, d.empty() ? std::to_string(runs.size()) + " invocations identical across 1, 3, 8 threads" : d};
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
        {1, {"exact variance oracle", exact_variance_oracle}},
        {2, {"constant continuity at t = c", constant_continuity}},
        {3, {"closed-form constants", closed_forms}},
        {4, {"TFBM variance slopes", tfbm_slopes}},
        {5, {"Gaussian Monte Carlo, j = 8 and 4", gaussian_mc}},
        {6, {"hard-taper universality", hard_taper}},
        {7, {"Lyapunov decay", lyapunov_decay}},
        {8, {"stable characteristic function", stable_cf}},
        {9, {"soft-taper coupling rate", coupling}},
        {10, {"kernel bridge", kernel_bridge}},
        {11, {"determinism across thread counts", determinism}},
    };
    std::vector<int> pick;
    for (int k = 1; k < argc; ++k) pick.push_back(std::atoi(argv[k]));
    if (pick.empty()) {
        for (const auto& [k, v] : criteria) pick.push_back(k);
    }
    int failed = 0;
    for (int k : pick) {
        const auto it = criteria.find(k);
        if (it == criteria.end()) {
            std::cout << "[FAIL] criterion " << k << ": unknown\n";
            ++failed;
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = it->second.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << k << ": " << it->second.first << " | "
                  << o.detail << " (" << fmt("%.1f", secs) << " s)" << std::endl;
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
