#include "tapered/cli.hpp"
#include "tapered/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace tapered;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "tapered");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("grid parsing")
{
    CHECK(parse_grid("0:0.05:2").size() == 41);
    CHECK(parse_grid("0:0.05:2").back() == doctest::Approx(2.0));
    CHECK(parse_grid("0.5,1,2") == std::vector<double>{0.5, 1.0, 2.0});
    CHECK_THROWS(parse_grid("1:0:2"));
}

TEST_CASE("constants")
{
    const auto r = run({"constants", "--beta", "0.5", "--id", "C3"});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].find("C3") != std::string::npos);
    CHECK(rows[1].substr(rows[1].rfind(',') + 1) == "2");

    CHECK(run({"constants", "--j", "7", "--beta", "1.2"}).code == 2);
    const auto w = run({"constants", "--j", "8", "--t", "0.5"});
    REQUIRE(w.code == 0);
    CHECK(w.out.find(",0.5\n") != std::string::npos);
}

TEST_CASE("usage errors exit with 2")
{
    const auto a = run({"verify", "stable", "--j", "2", "--alpha", "1"});
    CHECK(a.code == 2);
    CHECK(a.err.find("alpha = 1 is unsupported") != std::string::npos);
    CHECK(run({"verify", "gaussian", "--bogus"}).code == 2);
    CHECK(run({"verify", "gaussian", "--j", "8", "--replicas", "10"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("tfbm3 row count")
{
    const auto r = run({"simulate", "tfbm3", "--H", "0.8", "--c", "1", "--grid", "0:0.05:2", "--replicas", "100"});
    REQUIRE(r.code == 0);
    CHECK(data_lines(r.out).size() == 1 + 41 * 100);
}

TEST_CASE("json lines parse")
{
    const auto r = run({"simulate", "zn", "--j", "8", "--n", "512", "--grid", "0.5,1", "--replicas", "3",
                        "--format", "jsonl"});
    REQUIRE(r.code == 0);
    const auto rows = data_lines(r.out);
    REQUIRE(rows.size() == 6);
    for (const auto& line : rows) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("value"));
    }
}

TEST_CASE("output header reruns the same experiment")
{
    const auto dir = std::filesystem::temp_directory_path() / "tapered_cli_test";
    std::filesystem::create_directories(dir);
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    REQUIRE(run({"verify", "gaussian", "--j", "8", "--n", "256,1024", "--replicas", "200", "--bootstrap", "50",
                 "--seed", "11", "--output", a.string()})
                .code != 2);
    REQUIRE(run({"verify", "gaussian", "--config", a.string(), "--output", b.string()}).code != 2);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
    std::filesystem::remove_all(dir);
}
