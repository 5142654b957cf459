#include "shellvp/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "shellvp/action_angle.hpp"
#include "shellvp/initial_data.hpp"
#include "shellvp/linearized.hpp"
#include "shellvp/resolvent.hpp"
#include "shellvp/transport.hpp"

namespace shellvp {

using nlohmann::json;

namespace {

class Reader {
public:
    std::vector<std::string> errors;

    void keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
    {
        if (!j.is_object()) {
            errors.push_back(path + ": expected an object");
            return;
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (auto k : allowed) ok = ok || it.key() == k;
            if (!ok) errors.push_back((path.empty() ? "" : path + ".") + it.key() + ": unknown key");
        }
    }

    template <class T>
    void get(const json& j, const std::string& path, const char* key, T& out)
    {
        if (!j.is_object() || !j.contains(key)) return;
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back((path.empty() ? "" : path + ".") + key + ": wrong type");
        }
    }
};

void require(std::vector<std::string>& e, bool ok, const std::string& msg)
{
    if (!ok) e.push_back(msg);
}

}  // namespace

void to_json(json& j, const RunConfig& c)
{
    j = json{{"scenario", c.scenario},
             {"model", c.model},
             {"kepler", c.kepler},
             {"data", c.data},
             {"n_selfconsistent", c.n_selfconsistent},
             {"grid",
              {{"n_E", c.grid.n_E},
               {"n_L", c.grid.n_L},
               {"n_radial", c.grid.n_radial},
               {"n_columns", c.grid.n_columns},
               {"n_L_shell", c.grid.n_L_shell},
               {"grading", c.grid.grading},
               {"n_theta", c.grid.n_theta},
               {"M_max", c.grid.M_max},
               {"n_z", c.grid.n_z},
               {"n_y", c.grid.n_y}}},
             {"tolerances",
              {{"selfconsistent", c.tol.selfconsistent},
               {"orthogonality", c.tol.orthogonality},
               {"fit_residual", c.tol.fit_residual}}},
             {"time",
              {{"t_end", c.time.t_end},
               {"t_lo", c.time.t_lo},
               {"t_hi", c.time.t_hi},
               {"dt", c.time.dt},
               {"force_every", c.time.force_every},
               {"diag_every", c.time.diag_every},
               {"half_window", c.time.half_window}}},
             {"resolvent",
              {{"epsilon", c.resolvent.epsilon},
               {"lambda_per_side", c.resolvent.lambda_per_side},
               {"lambda_cut", c.resolvent.lambda_cut},
               {"mu_tilde", c.resolvent.mu_tilde},
               {"spacing", c.resolvent.spacing},
               {"stone_times", c.resolvent.stone_times}}},
             {"fit_inputs", c.fit_inputs},
             {"out", c.out},
             {"seed", c.seed},
             {"strict", c.strict}};
}

std::vector<std::string> validate_config(const RunConfig& c)
{
    std::vector<std::string> e;
    const auto& sn = scenario_names();
    require(e, std::find(sn.begin(), sn.end(), c.scenario) != sn.end(), "scenario: unknown scenario '" + c.scenario + "'");
    try {
        c.model.validate();
    } catch (const DomainError& x) {
        e.push_back(std::string("model: ") + x.what());
    }
    auto names = initial_data_names();
    require(e, std::find(names.begin(), names.end(), c.data) != names.end(), "data: unknown initial data '" + c.data + "'");
    require(e, c.n_selfconsistent >= 64, "n_selfconsistent: must be at least 64");

    const auto& g = c.grid;
    require(e, g.n_E >= 4, "grid.n_E: must be at least 4");
    require(e, g.n_L >= 4, "grid.n_L: must be at least 4");
    require(e, g.n_radial >= 3, "grid.n_radial: must be at least 3");
    require(e, g.n_columns >= 4 && (g.n_columns - 1) % 3 == 0, "grid.n_columns: must be 3P+1 with P >= 1");
    require(e, g.n_L_shell >= 2, "grid.n_L_shell: must be at least 2");
    require(e, g.grading > 0, "grid.grading: must be positive");
    require(e, g.M_max >= 1, "grid.M_max: must be at least 1");
    require(e, g.n_theta == 0 || (g.n_theta % 2 == 0 && g.n_theta >= 4 * g.M_max),
            "grid.n_theta: must be 0 or an even number >= 4 M_max");
    require(e, g.n_z >= 1, "grid.n_z: must be positive");
    require(e, g.n_y >= 3, "grid.n_y: must be at least 3");

    const auto& t = c.tol;
    require(e, t.selfconsistent > 0, "tolerances.selfconsistent: must be positive");
    require(e, t.orthogonality > 0, "tolerances.orthogonality: must be positive");
    require(e, t.fit_residual > 0, "tolerances.fit_residual: must be positive");

    const auto& tm = c.time;
    require(e, tm.t_end > 0, "time.t_end: must be positive");
    require(e, tm.t_lo > 0 && tm.t_hi > tm.t_lo, "time.t_lo/t_hi: need 0 < t_lo < t_hi");
    require(e, tm.dt >= 0, "time.dt: must be nonnegative");
    require(e, tm.force_every > 0, "time.force_every: must be positive");
    require(e, tm.diag_every > 0, "time.diag_every: must be positive");
    require(e, tm.half_window >= 0, "time.half_window: must be nonnegative");

    const auto& r = c.resolvent;
    require(e, !r.epsilon.empty(), "resolvent.epsilon: must not be empty");
    for (std::size_t k = 0; k < r.epsilon.size(); ++k) {
        require(e, r.epsilon[k] > 0, "resolvent.epsilon[" + std::to_string(k) + "]: must be positive");
        if (k) require(e, r.epsilon[k] < r.epsilon[k - 1], "resolvent.epsilon: must be decreasing");
    }
    require(e, r.lambda_per_side >= 2, "resolvent.lambda_per_side: must be at least 2");
    require(e, r.lambda_cut >= 0, "resolvent.lambda_cut: must be nonnegative");
    require(e, r.mu_tilde >= 0, "resolvent.mu_tilde: must be nonnegative");
    require(e, r.spacing > 0, "resolvent.spacing: must be positive");
    for (std::size_t k = 0; k < r.stone_times.size(); ++k)
        require(e, r.stone_times[k] >= 0, "resolvent.stone_times[" + std::to_string(k) + "]: must be nonnegative");

    if (c.scenario == "fit-decay") require(e, !c.fit_inputs.empty(), "fit_inputs: required by the fit-decay scenario");
    if (c.scenario == "evolve" || c.scenario == "resolvent")
        require(e, !c.kepler, "kepler: the " + c.scenario + " scenario needs a self-consistent model");
    require(e, !c.out.empty(), "out: must not be empty");
    return e;
}

RunConfig config_from_json(const json& j)
{
    RunConfig c;
    Reader rd;
    rd.keys(j, "",
            {"scenario", "model", "kepler", "data", "n_selfconsistent", "grid", "tolerances", "time", "resolvent",
             "fit_inputs", "out", "seed", "strict"});
    rd.get(j, "", "scenario", c.scenario);
    if (j.is_object() && j.contains("model")) {
        try {
            c.model = j.at("model").get<PolytropeParams>();
        } catch (const ConfigError& x) {
            rd.errors.push_back(x.what());
        } catch (const json::exception&) {
            rd.errors.push_back("model: wrong type");
        }
    }
    rd.get(j, "", "kepler", c.kepler);
    rd.get(j, "", "data", c.data);
    rd.get(j, "", "n_selfconsistent", c.n_selfconsistent);
    if (j.is_object() && j.contains("grid")) {
        const auto& g = j.at("grid");
        rd.keys(g, "grid", {"n_E", "n_L", "n_radial", "n_columns", "n_L_shell", "grading", "n_theta", "M_max", "n_z", "n_y"});
        rd.get(g, "grid", "n_E", c.grid.n_E);
        rd.get(g, "grid", "n_L", c.grid.n_L);
        rd.get(g, "grid", "n_radial", c.grid.n_radial);
        rd.get(g, "grid", "n_columns", c.grid.n_columns);
        rd.get(g, "grid", "n_L_shell", c.grid.n_L_shell);
        rd.get(g, "grid", "grading", c.grid.grading);
        rd.get(g, "grid", "n_theta", c.grid.n_theta);
        rd.get(g, "grid", "M_max", c.grid.M_max);
        rd.get(g, "grid", "n_z", c.grid.n_z);
        rd.get(g, "grid", "n_y", c.grid.n_y);
    }
    if (j.is_object() && j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        rd.keys(t, "tolerances", {"selfconsistent", "orthogonality", "fit_residual"});
        rd.get(t, "tolerances", "selfconsistent", c.tol.selfconsistent);
        rd.get(t, "tolerances", "orthogonality", c.tol.orthogonality);
        rd.get(t, "tolerances", "fit_residual", c.tol.fit_residual);
    }
    if (j.is_object() && j.contains("time")) {
        const auto& t = j.at("time");
        rd.keys(t, "time", {"t_end", "t_lo", "t_hi", "dt", "force_every", "diag_every", "half_window"});
        rd.get(t, "time", "t_end", c.time.t_end);
        rd.get(t, "time", "t_lo", c.time.t_lo);
        rd.get(t, "time", "t_hi", c.time.t_hi);
        rd.get(t, "time", "dt", c.time.dt);
        rd.get(t, "time", "force_every", c.time.force_every);
        rd.get(t, "time", "diag_every", c.time.diag_every);
        rd.get(t, "time", "half_window", c.time.half_window);
    }
    if (j.is_object() && j.contains("resolvent")) {
        const auto& r = j.at("resolvent");
        rd.keys(r, "resolvent", {"epsilon", "lambda_per_side", "lambda_cut", "mu_tilde", "spacing", "stone_times"});
        rd.get(r, "resolvent", "epsilon", c.resolvent.epsilon);
        rd.get(r, "resolvent", "lambda_per_side", c.resolvent.lambda_per_side);
        rd.get(r, "resolvent", "lambda_cut", c.resolvent.lambda_cut);
        rd.get(r, "resolvent", "mu_tilde", c.resolvent.mu_tilde);
        rd.get(r, "resolvent", "spacing", c.resolvent.spacing);
        rd.get(r, "resolvent", "stone_times", c.resolvent.stone_times);
    }
    rd.get(j, "", "fit_inputs", c.fit_inputs);
    rd.get(j, "", "out", c.out);
    rd.get(j, "", "seed", c.seed);
    rd.get(j, "", "strict", c.strict);

    auto errors = rd.errors;
    if (errors.empty()) errors = validate_config(c);
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (auto& x : errors) msg += "\n  " + x;
        throw ConfigError(msg);
    }
    return c;
}

RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& x) {
        throw ConfigError("config " + path + ": " + x.what());
    }
    return config_from_json(j);
}

std::uint64_t config_checksum(const RunConfig& c)
{
    json j = c;
    j.erase("out");
    return fnv1a64(j.dump());
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_csv(const CsvTable& t, const RunConfig& c, const std::string& title)
{
    std::ostringstream s;
    s << "# shellvp " << c.scenario << ": " << title << "\n";
    s << "# config_checksum fnv1a64:" << hex64(config_checksum(c)) << "\n";
    s << "# seed " << c.seed << "\n";
    for (std::size_t k = 0; k < t.columns.size(); ++k) s << (k ? "," : "") << t.columns[k];
    s << "\n";
    for (auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << format_number(row[k]);
        s << "\n";
    }
    return s.str();
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ls(line);
        std::string cell;
        if (!header) {
            while (std::getline(ls, cell, ',')) t.columns.push_back(cell);
            header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError(path + ": non-numeric cell '" + cell + "'");
            }
        }
        if (row.size() != t.columns.size()) throw ConfigError(path + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    if (!header) throw ConfigError(path + ": no header line");
    return t;
}

ArtifactWriter::ArtifactWriter(const RunConfig& c) : cfg_(c), dir_(c.out)
{
    std::filesystem::create_directories(dir_);
    json j = c;
    text("config.echo.json", j.dump(2) + "\n");
}

void ArtifactWriter::text(const std::string& name, const std::string& content)
{
    auto path = std::filesystem::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    artifacts_.push_back({name, fnv1a64(content), content.size()});
}

void ArtifactWriter::csv(const std::string& name, const CsvTable& t, const std::string& title)
{
    text(name, render_csv(t, cfg_, title));
}

void ArtifactWriter::finish()
{
    json a = json::array();
    for (auto& x : artifacts_) a.push_back({{"file", x.file}, {"bytes", x.bytes}, {"fnv1a64", hex64(x.checksum)}});
    json m{{"scenario", cfg_.scenario}, {"config_checksum", hex64(config_checksum(cfg_))}, {"artifacts", a}};
    auto path = std::filesystem::path(dir_) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << m.dump(2) << "\n";
}

std::vector<FitReportRow> fit_report(const std::vector<std::string>& inputs, const RunConfig& c)
{
    std::vector<FitReportRow> rows;
    double K = std::min(c.model.mu - 1, c.model.nu);
    if (c.data == "k1") K = std::min(K, 1.0);
    if (c.data == "jump") K = 0;
    for (auto& path : inputs) {
        auto t = read_csv(path);
        auto it = std::find(t.columns.begin(), t.columns.end(), "t");
        auto is = std::find(t.columns.begin(), t.columns.end(), "sup");
        if (it == t.columns.end() || is == t.columns.end()) throw ConfigError(path + ": needs columns t and sup");
        std::size_t ct = it - t.columns.begin(), cs = is - t.columns.begin();
        std::vector<double> times, values;
        for (auto& r : t.rows) {
            times.push_back(r[ct]);
            values.push_back(r[cs]);
        }
        DecayFitOptions o;
        o.t_lo = c.time.t_lo;
        o.t_hi = c.time.t_hi;
        o.residual_threshold = c.tol.fit_residual;
        o.half_window = c.time.half_window;
        auto fit = fit_decay_rate(times, values, o);
        rows.push_back({path, fit.exponent, fit.residual, K, fit.envelope, fit.points});
    }
    return rows;
}

std::string format_fit_report(const std::vector<FitReportRow>& rows)
{
    std::ostringstream s;
    for (auto& r : rows) {
        bool pass = std::abs(r.exponent - r.predicted_K) <= 0.3 * r.predicted_K;
        s << r.file << ": exponent " << format_number(r.exponent) << " residual " << format_number(r.residual)
          << (r.envelope ? " (envelope fit, " : " (raw fit, ") << r.points << " points), predicted K "
          << format_number(r.predicted_K) << " -> " << (pass ? "PASS" : "FAIL") << "\n";
    }
    return s.str();
}

namespace {

PolytropeModel build_model(const RunConfig& c)
{
    if (c.kepler) return build_kepler(c.model);
    SelfConsistentOptions o;
    o.n_radial = c.n_selfconsistent;
    o.tol = c.tol.selfconsistent;
    return build_selfconsistent(c.model, o);
}

ShellGridSpec shell_spec(const RunConfig& c)
{
    return {c.grid.n_radial, c.grid.n_columns, c.grid.n_L_shell, c.grid.grading};
}

int n_theta(const RunConfig& c) { return c.grid.n_theta ? c.grid.n_theta : 4 * c.grid.M_max; }

AnalyzeOptions analyze_options(const RunConfig& c) { return {c.strict, c.tol.orthogonality}; }

CsvTable force_table(const std::vector<double>& times, const std::vector<double>& radii,
                     const std::vector<std::vector<double>>& force)
{
    CsvTable t;
    t.columns = {"t", "sup"};
    for (std::size_t j = 0; j < radii.size(); ++j) t.columns.push_back("F_R" + std::to_string(j));
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row{times[k], 0.0};
        for (double v : force[k]) {
            row[1] = std::max(row[1], std::abs(v));
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable radii_table(const std::vector<double>& radii)
{
    CsvTable t;
    t.columns = {"index", "R"};
    for (std::size_t j = 0; j < radii.size(); ++j) t.rows.push_back({double(j), radii[j]});
    return t;
}

void steady_state(const RunConfig& c, ArtifactWriter& w)
{
    auto m = build_model(c);
    CsvTable t;
    t.columns = {"r", "U", "dU", "density"};
    int n = 257;
    double a = m.kepler() ? 0.5 * m.Rmin : 0.9 * m.Rmin, b = 1.1 * m.Rmax;
    for (int k = 0; k < n; ++k) {
        double r = a + (b - a) * k / (n - 1);
        t.rows.push_back({r, m.U(r), m.dU(r), m.density(r)});
    }
    w.csv("profile.csv", t, "potential and density");
    json j = m;
    if (j.contains("U_table")) j.erase("U_table");
    j["mass"] = m.mass();
    w.text("model.json", j.dump(2) + "\n");
    std::cout << "E0 " << format_number(m.E0) << " Rmin " << format_number(m.Rmin) << " Rmax " << format_number(m.Rmax)
              << " mass " << format_number(m.mass()) << "\n";
}

void action_angle(const RunConfig& c, ArtifactWriter& w)
{
    auto m = build_model(c);
    ActionChart chart(m, {c.grid.n_E, c.grid.n_L});
    CsvTable t;
    t.columns = {"E", "L", "r_minus", "r_plus", "T", "A", "omega"};
    for (int j = 0; j < chart.nL(); ++j)
        for (int i = 0; i < chart.nE(); ++i)
            t.rows.push_back({chart.E(i, j), chart.L_node(j), chart.rm(i, j), chart.rp(i, j), chart.T(i, j), chart.A(i, j),
                              chart.omega(i, j)});
    w.csv("chart.csv", t, "action-angle chart");
    json s{{"omega_min", chart.omega_min()}, {"omega_max", chart.omega_max()}, {"lambda_min", chart.lambda_min()},
           {"c0", chart.c0()},               {"omega_monotone", chart.omega_monotone()}};
    w.text("chart_summary.json", s.dump(2) + "\n");
    std::cout << "omega in [" << format_number(chart.omega_min()) << ", " << format_number(chart.omega_max())
              << "], lambda_min " << format_number(chart.lambda_min()) << "\n";
}

void transport(const RunConfig& c, ArtifactWriter& w)
{
    auto m = build_model(c);
    auto data = make_initial_data(c.data, m);
    TransportSetup s;
    s.grid = shell_spec(c);
    s.M_max = c.grid.M_max;
    s.n_theta = n_theta(c);
    s.t_lo = c.time.t_lo;
    s.t_hi = c.time.t_hi;
    s.dt = c.time.dt;
    s.analyze = analyze_options(c);
    auto r = run_transport(m, data, s);
    w.csv("force.csv", force_table(r.series.times, r.series.radii, r.series.force), "pure-transport force");
    w.csv("radii.csv", radii_table(r.series.radii), "radial nodes");
    CsvTable f;
    f.columns = {"exponent", "residual", "envelope", "points", "half_window", "predicted_K", "norm0", "norm_end"};
    f.rows.push_back({r.fit.exponent, r.fit.residual, double(r.fit.envelope), double(r.fit.points), r.half_window,
                      r.predicted_K, r.norm0, r.norm_end});
    w.csv("fit.csv", f, "decay fit");
    std::cout << "decay exponent " << format_number(r.fit.exponent) << " (predicted K " << format_number(r.predicted_K)
              << ")\n";
}

void evolve(const RunConfig& c, ArtifactWriter& w)
{
    auto m = build_model(c);
    auto data = make_initial_data(c.data, m);
    LinearizedSetup s;
    s.grid = shell_spec(c);
    s.M_max = c.grid.M_max;
    s.n_theta = c.grid.n_theta;
    LinearizedSystem sys(m, s);
    auto f0 = sys.project(data.f, analyze_options(c));
    RunOptions o;
    o.t_end = c.time.t_end;
    o.dt = c.time.dt;
    o.force_every = c.time.force_every;
    o.diag_every = c.time.diag_every;
    auto out = run(sys, f0, o);
    w.csv("force.csv", force_table(out.force_times, out.radii, out.force), "linearized force");
    w.csv("radii.csv", radii_table(out.radii), "radial nodes");
    CsvTable d;
    d.columns = {"t", "antonov", "mass", "zero_mode"};
    for (std::size_t k = 0; k < out.diag_times.size(); ++k)
        d.rows.push_back({out.diag_times[k], out.antonov[k], out.mass[k], out.zero_mode[k]});
    w.csv("diagnostics.csv", d, "conservation diagnostics");
    std::cout << "steps " << out.steps << " dt " << format_number(out.dt) << " antonov drift "
              << format_number(out.antonov_drift()) << "\n";
}

void resolvent(const RunConfig& c, ArtifactWriter& w)
{
    auto m = build_model(c);
    auto data = make_initial_data(c.data, m);
    ResolventGridSpec rs{c.grid.n_radial, c.grid.n_z, c.grid.n_y, c.grid.M_max, c.grid.n_theta};
    ResolventGrid g(m, rs);
    auto f0 = g.project(data.f, analyze_options(c));
    double lmin = TWO_PI * g.omega_min();
    double cut = c.resolvent.lambda_cut > 0 ? c.resolvent.lambda_cut : TWO_PI * c.grid.M_max * g.omega_max();
    auto lambdas = lambda_grid(lmin, cut, c.resolvent.lambda_per_side);
    auto rep = resolvent_bound_sweep(g, f0, lambdas, c.resolvent.epsilon.front());
    CsvTable b;
    b.columns = {"lambda", "epsilon", "lambda_U_plus", "lambda_U_minus", "lambda2_jump", "contraction"};
    for (auto& r : rep.rows) b.rows.push_back({r.lambda, r.epsilon, r.plus, r.minus, r.diff, r.contraction});
    w.csv("bounds.csv", b, "resolvent bound sweep");

    double mu = c.resolvent.mu_tilde > 0 ? c.resolvent.mu_tilde : default_mu_tilde(g.omega_min(), g.omega_max());
    CsvTable res;
    res.columns = {"lambda", "count", "min_abs_m"};
    for (double l : lambdas) {
        auto set = near_resonant_set(g.omega_min(), g.omega_max(), l, mu, c.grid.M_max);
        int mn = 0;
        for (int k : set) mn = mn ? std::min(mn, std::abs(k)) : std::abs(k);
        res.rows.push_back({l, double(set.size()), double(mn)});
    }
    w.csv("resonant_set.csv", res, "near-resonant set");

    json s{{"growth_slope", rep.growth_slope},
           {"diff_growth_slope", rep.diff_growth_slope},
           {"eps_ratio", rep.eps_ratio},
           {"max_contraction", rep.max_contraction},
           {"lambda_min", lmin}};
    w.text("bounds_summary.json", s.dump(2) + "\n");

    if (!c.resolvent.stone_times.empty()) {
        StoneOptions so;
        so.eps_schedule = c.resolvent.epsilon;
        so.spacing = c.resolvent.spacing;
        auto st = stone_reconstruct(g, f0, c.resolvent.stone_times, so);
        std::vector<std::vector<double>> total(st.times.size());
        for (std::size_t k = 0; k < st.times.size(); ++k)
            for (std::size_t j = 0; j < st.radii.size(); ++j) total[k].push_back(st.source[k][j] + st.coupling[k][j]);
        w.csv("stone_force.csv", force_table(st.times, st.radii, total), "lambda-integral force");
        w.csv("stone_coupling.csv", force_table(st.times, st.radii, st.coupling), "lambda-integral coupling force");
    }
    std::cout << "max contraction " << format_number(rep.max_contraction) << " growth slopes "
              << format_number(rep.growth_slope) << " " << format_number(rep.diff_growth_slope) << "\n";
}

void fit_decay(const RunConfig& c, ArtifactWriter& w)
{
    auto rows = fit_report(c.fit_inputs, c);
    auto text = format_fit_report(rows);
    w.text("fit_report.txt", text);
    CsvTable t;
    t.columns = {"input", "exponent", "residual", "envelope", "points", "predicted_K"};
    for (std::size_t k = 0; k < rows.size(); ++k)
        t.rows.push_back({double(k), rows[k].exponent, rows[k].residual, double(rows[k].envelope), double(rows[k].points),
                          rows[k].predicted_K});
    w.csv("fit.csv", t, "decay fits");
    std::cout << text;
}

}  // namespace

int run_scenario(const RunConfig& c)
{
    auto errors = validate_config(c);
    if (!errors.empty()) {
        for (auto& e : errors) std::cerr << "config error: " << e << "\n";
        return 2;
    }
    ArtifactWriter w(c);
    if (c.scenario == "steady-state") steady_state(c, w);
    else if (c.scenario == "action-angle") action_angle(c, w);
    else if (c.scenario == "transport") transport(c, w);
    else if (c.scenario == "evolve") evolve(c, w);
    else if (c.scenario == "resolvent") resolvent(c, w);
    else if (c.scenario == "fit-decay") fit_decay(c, w);
    w.finish();
    return 0;
}

}  // namespace shellvp
