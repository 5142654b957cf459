#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "shellvp/steady_state.hpp"

namespace shellvp {

inline const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> s{"steady-state", "action-angle", "transport", "evolve", "resolvent", "fit-decay"};
    return s;
}

struct GridConfig {
    int n_E = 129, n_L = 65;               // action chart
    int n_radial = 17, n_columns = 61, n_L_shell = 12;
    double grading = 3.0;
    int n_theta = 0;                        // 0 selects 4 M_max
    int M_max = 8;
    int n_z = 12, n_y = 49;                 // resolvent lines
};

struct ToleranceConfig {
    double selfconsistent = 1e-13;
    double orthogonality = 1e-8;
    double fit_residual = 0.05;
};

struct TimeConfig {
    double t_end = 200;
    double t_lo = 20, t_hi = 200;
    double dt = 0;
    double force_every = 0.25;
    double diag_every = 1.0;
    double half_window = 0;  // envelope window of fit-decay; 0 selects +-(rho - 1) t / 2
};

struct ResolventConfig {
    std::vector<double> epsilon{4e-2, 2e-2};
    int lambda_per_side = 20;
    double lambda_cut = 0;  // 0 selects 2 pi M_max omega_max
    double mu_tilde = 0;    // 0 selects 0.5 omega_min / omega_max
    double spacing = 1.0;
    std::vector<double> stone_times;
};

struct RunConfig {
    std::string scenario = "steady-state";
    PolytropeParams model;
    bool kepler = false;
    std::string data = "smooth";
    int n_selfconsistent = 2048;
    GridConfig grid;
    ToleranceConfig tol;
    TimeConfig time;
    ResolventConfig resolvent;
    std::vector<std::string> fit_inputs;
    std::string out = "out";
    std::uint64_t seed = 1;
    bool strict = false;
};

void to_json(nlohmann::json& j, const RunConfig& c);

// all problems found, each prefixed with its key path; empty when valid
std::vector<std::string> validate_config(const RunConfig& c);

// throws ConfigError listing every problem, one per line
RunConfig config_from_json(const nlohmann::json& j);
RunConfig parse_config(const std::string& path);

// canonical JSON of everything but the output directory
std::uint64_t config_checksum(const RunConfig& c);

// %.17g formatting
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// header comment block with the scenario and the config checksum
std::string render_csv(const CsvTable& t, const RunConfig& c, const std::string& title);

struct Artifact {
    std::string file;
    std::uint64_t checksum = 0;
    std::size_t bytes = 0;
};

class ArtifactWriter {
public:
    explicit ArtifactWriter(const RunConfig& c);
    void csv(const std::string& name, const CsvTable& t, const std::string& title);
    void text(const std::string& name, const std::string& content);
    // writes manifest.json listing every artifact
    void finish();
    const std::vector<Artifact>& artifacts() const { return artifacts_; }
    const std::string& dir() const { return dir_; }

private:
    const RunConfig& cfg_;
    std::string dir_;
    std::vector<Artifact> artifacts_;
};

// decay report for CSV files with columns t and sup
struct FitReportRow {
    std::string file;
    double exponent = 0, residual = 0, predicted_K = 0;
    bool envelope = false;
    int points = 0;
};
std::vector<FitReportRow> fit_report(const std::vector<std::string>& inputs, const RunConfig& c);
std::string format_fit_report(const std::vector<FitReportRow>& rows);

// reads a CSV written by render_csv: header comments skipped, first line holds the column names
CsvTable read_csv(const std::string& path);

// runs the configured scenario and writes its artifacts; returns the process exit status
int run_scenario(const RunConfig& c);

}  // namespace shellvp
