#include "tapered/cli.hpp"

#include "tapered/errors.hpp"
#include "tapered/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

namespace tapered {

namespace {

std::string num(double x)
{
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& s)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (trim(s.substr(pos)) != "") throw UsageError("not a number: '" + s + "'");
    return v;
}

template <class T>
std::string join(const std::vector<T>& v, const std::function<std::string(const T&)>& f)
{
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ',';
        out += f(v[k]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& v)
{
    return join<double>(v, [](const double& x) { return num(x); });
}

// Raw option storage; optional values are recovered from the option counts.
struct Raw {
    int j = 0;
    double beta = 0, gamma1 = 0, alpha = 0, gamma = 0, H = 0, delta = 0;
    std::vector<std::string> n, t, theta, ids;
    std::string format = "csv";
    std::string config;
};

struct Leaf {
    CLI::App* app;
    std::string command;
    std::map<std::string, CLI::Option*> opts;
    bool given(const std::string& key) const
    {
        auto it = opts.find(key);
        return it != opts.end() && it->second->count() > 0;
    }
};

class Writer {
public:
    Writer(const CliConfig& cfg, std::vector<std::pair<std::string, std::string>> header)
        : format_(cfg.format)
    {
        buf_ << "# tapered " << TAPERED_VERSION << '\n';
        buf_ << "# command=" << cfg.command << '\n';
        for (const auto& [k, v] : header) buf_ << "# " << k << '=' << v << '\n';
    }

    void columns(const std::vector<std::string>& names) { names_ = names; if (format_ == OutputFormat::Csv) line(names); }

    // cells are already formatted; empty cells become null in JSON
    void row(const std::vector<std::string>& cells, const std::set<std::size_t>& text_cols = {})
    {
        if (format_ == OutputFormat::Csv) {
            line(cells);
            return;
        }
        nlohmann::ordered_json rec;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].empty()) {
                rec[names_[k]] = nullptr;
            } else if (text_cols.count(k)) {
                rec[names_[k]] = cells[k];
            } else if (cells[k] == "true" || cells[k] == "false") {
                rec[names_[k]] = cells[k] == "true";
            } else {
                rec[names_[k]] = nlohmann::ordered_json::parse(cells[k], nullptr, false);
                if (rec[names_[k]].is_discarded()) rec[names_[k]] = cells[k];
            }
        }
        buf_ << rec.dump() << '\n';
    }

    void flush(const std::string& path, std::ostream& out) const
    {
        if (path == "-" || path.empty()) {
            out << buf_.str();
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw UsageError("cannot open output file '" + path + "'");
        f << buf_.str();
        if (!f) throw NumericalError("failed to write '" + path + "'");
    }

private:
    void line(const std::vector<std::string>& cells)
    {
        for (std::size_t k = 0; k < cells.size(); ++k) buf_ << (k ? "," : "") << cells[k];
        buf_ << '\n';
    }

    OutputFormat format_;
    std::vector<std::string> names_;
    std::ostringstream buf_;
};

using Header = std::vector<std::pair<std::string, std::string>>;

RegimeSpec regime_for(const CliConfig& cfg)
{
    if (!cfg.j) throw UsageError("--j is required");
    RegimeOptions opt;
    opt.beta = cfg.beta;
    opt.gamma1 = cfg.gamma1;
    opt.c = cfg.c;
    opt.innovation = innovation_for(cfg);
    return make_regime(*cfg.j, opt);
}

void regime_header(Header& h, const CliConfig& cfg, const RegimeSpec& regime)
{
    h.emplace_back("j", std::to_string(regime.case_index));
    h.emplace_back("beta", num(regime.filter.beta()));
    h.emplace_back("gamma1", num(regime.gamma1));
    h.emplace_back("c", num(regime.c));
    if (cfg.alpha) h.emplace_back("alpha", num(*cfg.alpha));
    if (cfg.gamma) h.emplace_back("gamma", num(*cfg.gamma));
}

void common_header(Header& h, const CliConfig& cfg)
{
    h.emplace_back("seed", std::to_string(cfg.seed));
    h.emplace_back("format", cfg.format == OutputFormat::Csv ? "csv" : "jsonl");
}

ExperimentPlan plan_for(const CliConfig& cfg, const RegimeSpec& regime)
{
    ExperimentPlan plan{regime};
    plan.n_ladder = cfg.n_ladder;
    plan.t_grid = cfg.t_grid;
    plan.theta_grid = cfg.theta_grid;
    plan.replicas = cfg.replicas;
    plan.master_seed = cfg.seed;
    plan.threshold = cfg.threshold;
    plan.bootstrap = cfg.bootstrap;
    plan.threads = resolve_threads(cfg.threads);
    plan.delta = cfg.delta;
    if (cfg.normalizer == "exact") {
        plan.normalizer = NormalizerKind::Exact;
    } else if (cfg.normalizer == "asymptotic") {
        plan.normalizer = NormalizerKind::Asymptotic;
    } else {
        throw UsageError("--normalizer must be exact or asymptotic");
    }
    if (cfg.coupling == "sparse") {
        plan.coupling = CouplingMethod::Sparse;
    } else if (cfg.coupling == "full") {
        plan.coupling = CouplingMethod::Full;
    } else {
        throw UsageError("--coupling must be sparse or full");
    }
    return plan;
}

int write_report(const CliConfig& cfg, const Header& header, const ComparisonReport& report, std::ostream& out,
                 std::ostream& err)
{
    Writer w(cfg, header);
    w.columns({"check", "case_j", "n", "t", "s", "theta", "estimate", "stderr", "theory", "z", "pass", "p_value"});
    for (const auto& r : report.rows) {
        w.row({r.check, std::to_string(r.case_j), std::to_string(r.n), num(r.t), num(r.s), num(r.theta),
               num(r.estimate), num(r.std_error), num(r.theory), num(r.z), r.pass ? "true" : "false", num(r.p_value)},
              {0});
    }
    w.flush(cfg.output, out);
    const bool ok = report.passed();
    err << "pass fraction " << num(report.pass_fraction()) << (ok ? " (pass)" : " (fail)") << '\n';
    return ok ? 0 : 1;
}

int cmd_constants(const CliConfig& cfg, std::ostream& out)
{
    Header h;
    std::vector<std::vector<std::string>> rows;
    const std::vector<double> ts = cfg.t_grid.empty() ? std::vector<double>{1.0} : cfg.t_grid;
    double beta = 0.0;
    if (cfg.j) {
        const RegimeSpec regime = regime_for(cfg);
        beta = regime.filter.beta();
        regime_header(h, cfg, regime);
        const int j = *cfg.j;
        for (double t : ts) {
            rows.push_back({"W", std::to_string(j), "", num(t), num(beta), num(cfg.c),
                            num(limit_variance(j, t, beta, cfg.c))});
        }
        rows.push_back({"H", std::to_string(j), "", "", num(beta), num(cfg.c), num(hurst_index(j, beta))});
        // growth exponent of the Gaussian normaliser A_n^2, read off two sizes
        const RegimeSpec plain = make_regime(j, {regime.filter.beta(), regime.gamma1, cfg.c, InnovationSpec::gaussian()});
        const double e = std::log(asymptotic_gaussian_norm_sq(plain, 1L << 20) / asymptotic_gaussian_norm_sq(plain, 1L << 10)) /
                         std::log(1024.0);
        rows.push_back({"An2_exponent", std::to_string(j), "", "", num(beta), num(cfg.c), num(e)});
    } else {
        if (!cfg.beta) throw UsageError("--beta or --j is required");
        beta = *cfg.beta;
        h.emplace_back("beta", num(beta));
        h.emplace_back("c", num(cfg.c));
    }
    if (!cfg.ids.empty() || !cfg.j) {
        const bool all = cfg.ids.empty() || (cfg.ids.size() == 1 && cfg.ids[0] == "all");
        std::vector<int> ids;
        if (all) {
            for (int k = 0; k <= 20; ++k) ids.push_back(k);
        } else {
            for (const auto& s : cfg.ids) {
                std::string d = (s.size() > 1 && (s[0] == 'C' || s[0] == 'c')) ? s.substr(1) : s;
                const double v = to_double(d);
                if (v != std::floor(v) || v < 0 || v > 20) throw UsageError("constant id must be C0..C20, got " + s);
                ids.push_back(static_cast<int>(v));
            }
        }
        h.emplace_back("id", all ? "all" : join<int>(ids, [](const int& k) { return "C" + std::to_string(k); }));
        for (int id : ids) {
            for (double t : ts) {
                double v = 0.0;
                try {
                    v = constant_C(id, t, beta, cfg.c);
                } catch (const DomainError&) {
                    if (all) continue;
                    throw;
                }
                rows.push_back({"C" + std::to_string(id), "", "", num(t), num(beta), num(cfg.c), num(v)});
            }
        }
    }
    h.emplace_back("t", join_doubles(ts));
    h.emplace_back("format", cfg.format == OutputFormat::Csv ? "csv" : "jsonl");
    Writer w(cfg, h);
    w.columns({"quantity", "case_j", "id", "t", "beta", "c", "value"});
    for (const auto& r : rows) w.row(r, {0});
    w.flush(cfg.output, out);
    return 0;
}

int cmd_verify(const std::string& kind, CliConfig cfg, std::ostream& out, std::ostream& err)
{
    const RegimeSpec regime = regime_for(cfg);
    const bool slow_ladder = kind == "coupling";
    if (cfg.n_ladder.empty()) {
        cfg.n_ladder = slow_ladder ? std::vector<long>{1000, 10000, 100000} : std::vector<long>{1024, 4096, 16384};
    }
    if (cfg.t_grid.empty()) {
        cfg.t_grid = (kind == "lyapunov" || kind == "coupling") ? std::vector<double>{1.0}
                                                                 : std::vector<double>{0.5, 1.0, 2.0};
    }
    if (cfg.theta_grid.empty()) cfg.theta_grid = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    if (cfg.replicas == 0) cfg.replicas = kind == "coupling" ? 100000 : 1000;

    const ExperimentPlan plan = plan_for(cfg, regime);
    Header h;
    regime_header(h, cfg, regime);
    h.emplace_back("n", join<long>(cfg.n_ladder, [](const long& n) { return std::to_string(n); }));
    h.emplace_back("t", join_doubles(cfg.t_grid));
    h.emplace_back("replicas", std::to_string(cfg.replicas));
    h.emplace_back("threshold", num(cfg.threshold));

    ComparisonReport report;
    if (kind == "gaussian") {
        h.emplace_back("bootstrap", std::to_string(cfg.bootstrap));
        h.emplace_back("normalizer", cfg.normalizer);
        report = run_gaussian_check(plan);
    } else if (kind == "stable") {
        h.emplace_back("theta", join_doubles(cfg.theta_grid));
        h.emplace_back("bootstrap", std::to_string(cfg.bootstrap));
        report = run_stable_check(plan);
    } else if (kind == "lyapunov") {
        const double delta = plan.delta.value_or(default_lyapunov_delta(regime));
        h.emplace_back("delta", num(delta));
        report = run_lyapunov_sweep(plan);
    } else {
        h.emplace_back("r", num(cfg.r));
        h.emplace_back("coupling", cfg.coupling);
        report = run_coupling_check(plan, cfg.r);
    }
    common_header(h, cfg);
    return write_report(cfg, h, report, out, err);
}

int cmd_simulate(const std::string& kind, CliConfig cfg, std::ostream& out)
{
    if (cfg.replicas == 0) cfg.replicas = 1;
    Header h;
    PathMatrix paths;
    if (kind == "zn") {
        const RegimeSpec regime = regime_for(cfg);
        if (cfg.n_ladder.size() > 1) throw UsageError("simulate zn takes a single --n");
        const long n = cfg.n_ladder.empty() ? 1024 : cfg.n_ladder.front();
        if (cfg.t_grid.empty()) cfg.t_grid = parse_grid("0:0.05:1");
        regime_header(h, cfg, regime);
        h.emplace_back("n", std::to_string(n));
        h.emplace_back("normalizer", cfg.normalizer);
        const NormalizerKind nk = plan_for(cfg, regime).normalizer;
        paths = simulate_normalized_paths(regime, n, cfg.t_grid, cfg.replicas, cfg.seed, resolve_threads(cfg.threads), nk);
    } else {
        if (!cfg.H) throw UsageError("--H is required");
        const double alpha = kind == "tfbm3" ? 2.0 : cfg.alpha.value_or(0.0);
        if (kind == "tfsm3" && !cfg.alpha) throw UsageError("--alpha is required");
        if (cfg.t_grid.empty()) cfg.t_grid = parse_grid("0:0.05:1");
        const TFKernel kernel(*cfg.H, alpha, cfg.c);
        Tfsm3Options opt;
        opt.skew = cfg.skew;
        opt.sigma = cfg.sigma;
        opt.step = cfg.step;
        opt.threads = resolve_threads(cfg.threads);
        h.emplace_back("H", num(*cfg.H));
        if (kind == "tfsm3") {
            h.emplace_back("alpha", num(alpha));
            h.emplace_back("skew", num(cfg.skew));
        }
        h.emplace_back("c", num(cfg.c));
        h.emplace_back("sigma", num(cfg.sigma));
        h.emplace_back("step", num(cfg.step));
        paths = simulate_tfsm3(kernel, cfg.t_grid, cfg.replicas, cfg.seed, opt);
    }
    h.emplace_back("t", join_doubles(cfg.t_grid));
    h.emplace_back("replicas", std::to_string(cfg.replicas));
    common_header(h, cfg);
    Writer w(cfg, h);
    w.columns({"replica", "t", "value"});
    for (std::size_t r = 0; r < paths.replicas; ++r) {
        for (std::size_t k = 0; k < paths.points; ++k) {
            w.row({std::to_string(r), num(cfg.t_grid[k]), num(paths.at(r, k))});
        }
    }
    w.flush(cfg.output, out);
    return 0;
}

// Config-file values enter as --key=value arguments unless the key was given on
// the command line, so flags always win.
std::vector<std::string> merge_config_args(std::vector<std::string> args, std::string& command_in_file)
{
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return args;
    auto given = [&](const std::string& key) {
        for (const auto& a : args) {
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        }
        return false;
    };
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "command") {
            command_in_file = value;
            continue;
        }
        if (key == "tapered" || key == "version") continue;
        if (!given(key)) args.push_back("--" + key + "=" + value);
    }
    return args;
}

} // namespace

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto c1 = item.find(':');
        if (c1 == std::string::npos) {
            out.push_back(to_double(item));
            continue;
        }
        const auto c2 = item.find(':', c1 + 1);
        if (c2 == std::string::npos) throw UsageError("range must read start:step:stop, got '" + item + "'");
        const double a = to_double(item.substr(0, c1));
        const double step = to_double(item.substr(c1 + 1, c2 - c1 - 1));
        const double b = to_double(item.substr(c2 + 1));
        if (!(step > 0.0) || b < a) throw UsageError("range needs step > 0 and stop >= start, got '" + item + "'");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
        if (count > 10000000) throw UsageError("range '" + item + "' is too long");
        for (long k = 0; k <= count; ++k) out.push_back(a + static_cast<double>(k) * step);
    }
    if (out.empty()) throw UsageError("empty grid '" + text + "'");
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        std::string s = trim(line);
        if (!s.empty() && s[0] == '#') s = trim(s.substr(1));
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        const std::string key = trim(s.substr(0, eq));
        if (key.find_first_of(" \t,{\"") != std::string::npos) continue;
        kv[key] = trim(s.substr(eq + 1));
    }
    return kv;
}

InnovationSpec innovation_for(const CliConfig& cfg)
{
    if (!cfg.alpha) {
        if (cfg.gamma) throw UsageError("--gamma needs --alpha");
        return InnovationSpec::gaussian();
    }
    const double alpha = *cfg.alpha;
    if (alpha == 1.0) throw UsageError("alpha = 1 is unsupported");
    if (!cfg.gamma) return InnovationSpec::stable_pareto(alpha);
    const auto level = TaperLevel::growing(*cfg.gamma);
    switch (classify_innovation_taper(alpha, *cfg.gamma)) {
    case InnovationTaper::Hard: return InnovationSpec::centered_tapered(alpha, level);
    case InnovationTaper::Soft: return InnovationSpec::stable_tapered(alpha, level);
    case InnovationTaper::Intermediate: break;
    }
    return alpha > 1.0 ? InnovationSpec::centered_tapered(alpha, level) : InnovationSpec::tapered(alpha, level);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Tapered linear processes: limit constants, Monte Carlo checks and path simulation", "tapered"};
    app.set_version_flag("--version", TAPERED_VERSION);
    app.require_subcommand(1);

    CliConfig cfg;
    Raw raw;
    std::vector<Leaf> leaves;

    auto add_leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, const std::string& command,
                        const std::vector<std::string>& keys) {
        CLI::App* sub = parent->add_subcommand(name, desc);
        Leaf leaf{sub, command, {}};
        auto& o = leaf.opts;
        o["config"] = sub->add_option("--config", raw.config, "flat key=value file; flags override it");
        o["output"] = sub->add_option("--output,-o", cfg.output, "output path, - for stdout");
        o["format"] = sub->add_option("--format", raw.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
        o["threads"] = sub->add_option("--threads", cfg.threads, "worker threads (default: TAPERED_THREADS or all cores)");
        o["seed"] = sub->add_option("--seed", cfg.seed, "master seed");
        for (const auto& k : keys) {
            if (k == "j") o[k] = sub->add_option("--j", raw.j, "case index 1..12");
            if (k == "beta") o[k] = sub->add_option("--beta", raw.beta, "filter decay exponent");
            if (k == "gamma1") o[k] = sub->add_option("--gamma1", raw.gamma1, "filter truncation exponent");
            if (k == "c") o[k] = sub->add_option("--c", cfg.c, "truncation scale");
            if (k == "alpha") o[k] = sub->add_option("--alpha", raw.alpha, "Pareto tail index");
            if (k == "gamma") o[k] = sub->add_option("--gamma", raw.gamma, "innovation taper exponent, b_n = n^gamma");
            if (k == "H") o[k] = sub->add_option("--H", raw.H, "Hurst exponent");
            if (k == "n") o[k] = sub->add_option("--n", raw.n, "sample sizes")->delimiter(',');
            if (k == "t") o[k] = sub->add_option("--t,--grid", raw.t, "time points, lists or start:step:stop")->delimiter(',');
            if (k == "theta") o[k] = sub->add_option("--theta", raw.theta, "characteristic function arguments")->delimiter(',');
            if (k == "id") o[k] = sub->add_option("--id", raw.ids, "constants C0..C20 or all")->delimiter(',');
            if (k == "replicas") o[k] = sub->add_option("--replicas", cfg.replicas, "Monte Carlo replicas");
            if (k == "bootstrap") o[k] = sub->add_option("--bootstrap", cfg.bootstrap, "bootstrap resamples");
            if (k == "normalizer") o[k] = sub->add_option("--normalizer", cfg.normalizer, "exact or asymptotic");
            if (k == "delta") o[k] = sub->add_option("--delta", raw.delta, "Lyapunov order");
            if (k == "r") o[k] = sub->add_option("--r", cfg.r, "coupling moment order");
            if (k == "coupling") o[k] = sub->add_option("--coupling", cfg.coupling, "sparse or full");
            if (k == "threshold") o[k] = sub->add_option("--threshold", cfg.threshold, "z-score threshold");
            if (k == "skew") o[k] = sub->add_option("--skew", cfg.skew, "skewness of the random measure");
            if (k == "sigma") o[k] = sub->add_option("--sigma", cfg.sigma, "control density of the random measure");
            if (k == "step") o[k] = sub->add_option("--step", cfg.step, "Riemann cell width, 0 for automatic");
        }
        leaves.push_back(leaf);
    };

    const std::vector<std::string> regime_keys{"j", "beta", "gamma1", "c", "alpha", "gamma"};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> k = regime_keys;
        k.insert(k.end(), extra.begin(), extra.end());
        return k;
    };

    add_leaf(&app, "constants", "variance constants, variance functions and Hurst indices", "constants",
             with({"t", "id"}));
    CLI::App* verify = app.add_subcommand("verify", "Monte Carlo comparison with the limit laws");
    verify->require_subcommand(1);
    add_leaf(verify, "gaussian", "variance, covariance and normality checks", "verify gaussian",
             with({"n", "t", "replicas", "bootstrap", "normalizer", "threshold"}));
    add_leaf(verify, "stable", "characteristic function checks", "verify stable",
             with({"n", "t", "theta", "replicas", "bootstrap", "threshold"}));
    add_leaf(verify, "lyapunov", "Lyapunov fraction decay", "verify lyapunov", with({"n", "t", "delta", "threshold"}));
    add_leaf(verify, "coupling", "coupling distance between tapered and raw input", "verify coupling",
             with({"n", "t", "r", "replicas", "coupling", "threshold"}));
    CLI::App* simulate = app.add_subcommand("simulate", "export simulated paths");
    simulate->require_subcommand(1);
    add_leaf(simulate, "zn", "normalised partial-sum process", "simulate zn", with({"n", "t", "replicas", "normalizer"}));
    add_leaf(simulate, "tfbm3", "tapered fractional Brownian motion", "simulate tfbm3",
             {"H", "c", "t", "replicas", "sigma", "step"});
    add_leaf(simulate, "tfsm3", "tapered fractional stable motion", "simulate tfsm3",
             {"H", "alpha", "c", "t", "replicas", "skew", "sigma", "step"});

    try {
        std::vector<std::string> args;
        for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
        std::string file_command;
        args = merge_config_args(std::move(args), file_command);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        const Leaf* leaf = nullptr;
        for (const auto& l : leaves) {
            if (l.app->parsed()) leaf = &l;
        }
        if (!leaf) throw UsageError("no subcommand selected");
        if (!file_command.empty() && file_command != leaf->command) {
            throw UsageError("config file belongs to '" + file_command + "', not '" + leaf->command + "'");
        }
        cfg.command = leaf->command;
        if (leaf->given("j")) cfg.j = raw.j;
        if (leaf->given("beta")) cfg.beta = raw.beta;
        if (leaf->given("gamma1")) cfg.gamma1 = raw.gamma1;
        if (leaf->given("alpha")) cfg.alpha = raw.alpha;
        if (leaf->given("gamma")) cfg.gamma = raw.gamma;
        if (leaf->given("H")) cfg.H = raw.H;
        if (leaf->given("delta")) cfg.delta = raw.delta;
        for (const auto& s : raw.n) {
            const double v = to_double(s);
            if (v != std::floor(v) || v < 1 || v > 1e12) throw UsageError("--n entries must be positive integers");
            cfg.n_ladder.push_back(static_cast<long>(v));
        }
        for (const auto& s : raw.t) {
            const auto g = parse_grid(s);
            cfg.t_grid.insert(cfg.t_grid.end(), g.begin(), g.end());
        }
        for (const auto& s : raw.theta) cfg.theta_grid.push_back(to_double(s));
        cfg.ids = raw.ids;
        cfg.format = raw.format == "jsonl" ? OutputFormat::JsonLines : OutputFormat::Csv;

        const auto space = cfg.command.find(' ');
        const std::string head = cfg.command.substr(0, space);
        const std::string kind = space == std::string::npos ? "" : cfg.command.substr(space + 1);
        if (head == "constants") return cmd_constants(cfg, out);
        if (head == "verify") return cmd_verify(kind, cfg, out, err);
        return cmd_simulate(kind, cfg, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const SizeError& e) {
        err << "refused: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace tapered
