#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shellvp/cli_io.hpp"

using namespace shellvp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("shellvp_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string error_of(const nlohmann::json& j)
{
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config: minimal kepler config fills defaults and echoes")
{
    auto dir = scratch("minimal");
    auto path = dir / "cfg.json";
    std::ofstream(path) << R"({"scenario": "steady-state", "kepler": true, "out": ")" << (dir / "out").string() << "\"}";
    auto c = parse_config(path.string());
    CHECK(c.kepler);
    CHECK(c.model.mu == 3.5);
    CHECK(c.grid.M_max == 8);
    CHECK(c.resolvent.epsilon.size() == 2);
    CHECK(run_scenario(c) == 0);
    auto echo = nlohmann::json::parse(slurp(dir / "out" / "config.echo.json"));
    CHECK(echo["model"]["kappa"] == -0.25);
    CHECK(echo["grid"]["n_radial"] == 17);
    CHECK(fs::exists(dir / "out" / "profile.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("config: rejections")
{
    CHECK(error_of({{"model", {{"kappa", -0.7}}}}).find("E:NOGAP") != std::string::npos);
    CHECK(error_of({{"model", {{"kappa", 0.1}}}}).find("E:NOGAP") != std::string::npos);
    CHECK(error_of({{"grid", {{"bogus", 1}}}}).find("grid.bogus: unknown key") != std::string::npos);
    CHECK(error_of({{"model", {{"muu", 3}}}}).find("model.muu") != std::string::npos);
    CHECK(error_of({{"typo", 1}}).find("typo: unknown key") != std::string::npos);
    CHECK(error_of({{"grid", {{"M_max", "eight"}}}}).find("grid.M_max: wrong type") != std::string::npos);
    CHECK(error_of({{"tolerances", {{"orthogonality", 0.0}}}}).find("tolerances.orthogonality") != std::string::npos);
    CHECK(error_of({{"grid", {{"M_max", 0}}}}).find("grid.M_max") != std::string::npos);
    CHECK(error_of({{"scenario", "fit-decay"}}).find("fit_inputs") != std::string::npos);
    CHECK(error_of({{"resolvent", {{"epsilon", {0.01, 0.02}}}}}).find("decreasing") != std::string::npos);
    // every problem is reported
    auto e = error_of({{"grid", {{"M_max", 0}, {"n_y", 1}}}});
    CHECK(e.find("grid.M_max") != std::string::npos);
    CHECK(e.find("grid.n_y") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("csv: 17 significant digits, checksum header, round trip")
{
    RunConfig c;
    CsvTable t;
    t.columns = {"t", "sup"};
    t.rows = {{0.1, 1.0 / 3.0}, {2.5, -1e-300}};
    auto s = render_csv(t, c, "demo");
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("# config_checksum fnv1a64:" + hex64(config_checksum(c))) != std::string::npos);
    auto dir = scratch("csv");
    std::ofstream(dir / "a.csv") << s;
    auto back = read_csv((dir / "a.csv").string());
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    RunConfig d = c;
    d.seed = 7;
    CHECK(config_checksum(d) != config_checksum(c));
}

TEST_CASE("scenario outputs are deterministic and listed in the manifest")
{
    auto dir = scratch("det");
    RunConfig c;
    c.scenario = "action-angle";
    c.grid.n_E = 9;
    c.grid.n_L = 5;
    c.out = (dir / "a").string();
    REQUIRE(run_scenario(c) == 0);
    c.out = (dir / "b").string();
    REQUIRE(run_scenario(c) == 0);
    CHECK(slurp(dir / "a" / "chart.csv") == slurp(dir / "b" / "chart.csv"));
    auto man = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(man["artifacts"].size() >= 3);
    for (auto& a : man["artifacts"]) {
        auto content = slurp(dir / "a" / a["file"].get<std::string>());
        CHECK(a["fnv1a64"] == hex64(fnv1a64(content)));
        CHECK(a["bytes"] == content.size());
    }
}

TEST_CASE("fit-decay report")
{
    auto dir = scratch("fit");
    RunConfig c;
    CsvTable t;
    t.columns = {"t", "sup"};
    for (double x = 0; x <= 220; x += 0.5) t.rows.push_back({x, std::pow(1 + x, -2.0) * (1.5 + std::cos(x))});
    std::ofstream(dir / "force.csv") << render_csv(t, c, "synthetic");
    c.scenario = "fit-decay";
    c.fit_inputs = {(dir / "force.csv").string()};
    c.out = (dir / "out").string();
    auto rows = fit_report(c.fit_inputs, c);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].envelope);
    CHECK(rows[0].exponent == doctest::Approx(2.0).epsilon(0.05));
    CHECK(rows[0].predicted_K == 2.0);
    CHECK(format_fit_report(rows).find("PASS") != std::string::npos);
    CHECK(run_scenario(c) == 0);
    CHECK(fs::exists(dir / "out" / "fit_report.txt"));
}
