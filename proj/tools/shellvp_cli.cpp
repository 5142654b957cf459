#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "shellvp/acceptance.hpp"
#include "shellvp/cli_io.hpp"

using namespace shellvp;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int threads = 0;
    bool strict = false;
};

RunConfig load(const Flags& f, const std::string& scenario)
{
    RunConfig c;
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw ConfigError("cannot open config file: " + f.config);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config " + f.config + ": " + e.what());
        }
        j["scenario"] = scenario;
        c = config_from_json(j);
    } else {
        c.scenario = scenario;
    }
    if (!f.out.empty()) c.out = f.out;
    if (f.strict) c.strict = true;
    auto errors = validate_config(c);
    if (!errors.empty()) {
        std::string msg = "invalid configuration:";
        for (auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return c;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"shellvp: linearized Vlasov-Poisson around shell polytropes"};
    app.require_subcommand(1);
    Flags f;
    auto add_common = [&](CLI::App* s) {
        s->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
        s->add_option("--out", f.out, "output directory (overrides the config)");
        s->add_option("--threads", f.threads, "worker threads (default: SHELLVP_THREADS or hardware)")
            ->check(CLI::PositiveNumber);
        s->add_flag("--strict", f.strict, "reject initial data with a nonzero orbit average");
    };
    for (const auto& name : scenario_names()) add_common(app.add_subcommand(name, "run the " + name + " scenario"));

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify);
    std::vector<int> only;
    verify->add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 13));

    CLI11_PARSE(app, argc, argv);
    if (f.threads > 0) set_thread_count(f.threads);

    try {
        auto* sub = app.get_subcommands().front();
        if (sub == verify) {
            AcceptanceOptions opt;
            opt.only.insert(only.begin(), only.end());
            if (!f.config.empty()) opt.seed = load(f, "steady-state").seed;
            auto results = run_acceptance(std::cout, opt);
            int failed = 0;
            for (auto& r : results) failed += !r.pass;
            std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
            return failed ? 1 : 0;
        }
        return run_scenario(load(f, sub->get_name()));
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
