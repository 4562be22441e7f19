#pragma once

#include "tapered/mc_harness.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tapered {

enum class OutputFormat { Csv, JsonLines };

/// Resolved command-line configuration shared by every subcommand.
struct CliConfig {
    std::string command; ///< "constants", "verify gaussian", "simulate zn", ...
    std::optional<int> j;
    std::optional<double> beta;
    std::optional<double> gamma1;
    std::optional<double> alpha;
    std::optional<double> gamma; ///< innovation taper b_n = n^gamma
    std::optional<double> H;
    double c = 1.0;
    std::vector<long> n_ladder;
    std::vector<double> t_grid;
    std::vector<double> theta_grid;
    std::vector<std::string> ids;
    std::size_t replicas = 0;
    std::uint64_t seed = 1;
    std::size_t bootstrap = 500;
    std::string normalizer = "exact";
    std::string coupling = "sparse";
    std::optional<double> delta;
    double r = 1.0;
    double threshold = 3.0;
    double skew = 1.0;
    double sigma = 1.0;
    double step = 0.0;
    std::string output = "-";
    OutputFormat format = OutputFormat::Csv;
    int threads = 0;
};

/// Expands "a:step:b" ranges and comma lists into ascending values.
std::vector<double> parse_grid(const std::string& text);

/// Flat key=value reader. Blank lines and lines without '=' are skipped; a leading
/// '#' is stripped so that output headers can be read back.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Innovation law implied by alpha and gamma: Gaussian without alpha, raw Pareto
/// without gamma, centred tapered for hard and uncentred-or-centred soft tapering.
InnovationSpec innovation_for(const CliConfig& cfg);

/// Entry point. Returns the process exit code: 0 pass, 1 statistical failure,
/// 2 usage or domain error, 3 numerical error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tapered
