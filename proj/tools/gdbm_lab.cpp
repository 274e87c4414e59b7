// Command-line front end for the experiment runner.
//
//   gdbm_lab run <config.json> [--output DIR]   run an experiment, write artifacts
//   gdbm_lab replay <manifest.json>             re-run and verify byte-identical CSVs
//   gdbm_lab list-kinds                         print the available experiment kinds
//
// Exit codes: 0 all checks passed (or replay verified), 1 a check failed,
// 2 configuration / replay / IO error.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loggas/experiments.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& output) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config '" << config_path << "'\n";
        return 2;
    }
    loggas::ordered_json config;
    try {
        in >> config;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }
    try {
        const loggas::RunOutcome outcome = loggas::run_and_write(config, output);
        std::cout << "wrote " << outcome.outdir.string() << "\n";
        if (outcome.pass) {
            std::cout << "all checks passed\n";
            return 0;
        }
        std::cout << "failed checks:";
        for (const auto& name : outcome.failed_checks) std::cout << ' ' << name;
        std::cout << "\n";
        return 1;
    } catch (const loggas::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int replay_command(const std::string& manifest_path) {
    try {
        loggas::replay(manifest_path);
        std::cout << "replay verified: outputs are byte-identical\n";
        return 0;
    } catch (const loggas::replay_mismatch& e) {
        std::cerr << "replay mismatch in '" << e.file << "'";
        if (e.row > 0) std::cerr << " at row " << e.row;
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for log-gas particle systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    auto* output_opt = run->add_option("--output", output_dir, "override the output directory");

    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and verify its CSV outputs");
    replay->add_option("manifest", manifest_path, "path to a manifest.json")->required();

    auto* kinds = app.add_subcommand("list-kinds", "print the available experiment kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        std::optional<std::string> output;
        if (output_opt->count() > 0) output = output_dir;
        return run_command(config_path, output);
    }
    if (replay->parsed()) return replay_command(manifest_path);
    if (kinds->parsed()) {
        for (const auto& k : loggas::list_kinds()) std::cout << k << "\n";
        return 0;
    }
    return 2;
}
