#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlab/scenario.hpp"

namespace {

int run_one(const wlab::json& config, const std::string& out_dir, bool strict) {
    wlab::RunOutcome outcome = wlab::run_scenario(config, out_dir, strict);
    std::cout << outcome.message << "\n";
    for (const auto& chk : outcome.report.at("checks"))
        std::cout << "  [" << chk.at("status").get<std::string>() << "] "
                  << chk.at("id").get<std::string>() << "  value="
                  << chk.at("value").get<double>() << "  tol="
                  << chk.at("tolerance").get<double>() << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy and Harnack checks for weighted one-dimensional heat flows"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    bool strict = false;
    CLI::App* run = app.add_subcommand("run", "run one scenario from a config file");
    run->add_option("--config", config_path, "path to the scenario config")->required();
    run->add_option("--out", out_dir, "output directory for report and series files");
    run->add_flag("--strict", strict, "reject unknown config keys, omit timestamps");

    CLI::App* list = app.add_subcommand("list", "list built-in scenarios and check ids");

    std::string describe_id;
    CLI::App* describe = app.add_subcommand("describe", "describe one check id");
    describe->add_option("id", describe_id, "check id")->required();

    bool battery_all = false;
    std::string battery_out = "out";
    bool battery_strict = false;
    CLI::App* battery = app.add_subcommand("battery", "run the built-in scenario battery");
    battery->add_flag("--all", battery_all, "run every built-in scenario");
    battery->add_option("--out", battery_out, "output directory root");
    battery->add_flag("--strict", battery_strict, "reject unknown config keys, omit timestamps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: cannot open config file " << config_path << "\n";
                return 2;
            }
            wlab::json config;
            try {
                config = wlab::json::parse(in);
            } catch (const wlab::json::parse_error& e) {
                std::cerr << "error: config parse failure: " << e.what() << "\n";
                return 2;
            }
            return run_one(config, out_dir, strict);
        }
        if (list->parsed()) {
            std::cout << "built-in scenarios:\n";
            for (const std::string& name : wlab::builtin_scenario_names())
                std::cout << "  " << name << "\n";
            std::cout << "checks:\n";
            for (const wlab::CheckInfo& info : wlab::check_registry())
                std::cout << "  " << info.id << " (" << wlab::kind_name(info.kind) << ")\n";
            for (const char* extra : {"SOLITON_CONSTANT", "MEASURE_INVARIANCE",
                                      "SUPER_RICCI_DEFECT", "LOGSOBOLEV_EXTREMAL"})
                std::cout << "  " << extra << "\n";
            return 0;
        }
        if (describe->parsed()) {
            std::cout << wlab::describe_check(describe_id) << "\n";
            return 0;
        }
        if (battery->parsed()) {
            if (!battery_all) {
                std::cerr << "error: battery needs --all\n";
                return 2;
            }
            int worst = 0;
            for (const std::string& name : wlab::builtin_scenario_names()) {
                std::cout << "=== " << name << " ===\n";
                const int code =
                    run_one(wlab::builtin_scenario(name), battery_out + "/" + name,
                            battery_strict);
                worst = std::max(worst, code);
            }
            return worst;
        }
    } catch (const wlab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const wlab::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
