// Command-line driver: run, validate and export scenarios.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sbr/error.hpp"
#include "sbr/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kLedgerOpen = 1, kConfig = 2, kRunFailed = 3, kIo = 4 };

// A path, or the name of a bundled scenario ("example1" or "example1.json").
sbr::Scenario resolve(const std::string& arg) {
    if (fs::exists(arg)) return sbr::load_scenario(arg);
    for (const auto& [file, text] : sbr::bundled_scenarios())
        if (arg == file || arg + ".json" == file) return sbr::parse_scenario(text, file);
    throw sbr::ConfigError("", "no such scenario file: " + arg);
}

int run(const std::string& path, std::size_t cells, const std::string& out_dir) {
    sbr::Scenario sc = resolve(path);
    if (cells) {
        if (cells < 10) throw sbr::ConfigError("/numerics/cells", "expected an integer >= 10");
        sc.cells = cells;
    }
    const sbr::RunResult r = sbr::run(sc);
    sbr::write_outputs(r, sc, out_dir);
    std::printf("%s: %zu stages, N = %zu, %zu samples, %.2f s wall\n", sc.name.c_str(), sc.stages.size(), sc.cells,
                r.outlets.size(), r.wall_seconds);
    for (const auto& c : r.closure)
        std::printf("  %-8s closure %.3e  (in %.6g, out_u %.6g, out_e %.6g, reacted %.6g kg)\n", c.name.c_str(),
                    c.relative, c.inflow, c.underflow, c.effluent, c.reacted);
    std::printf("  handshake %.3e, min C %.3g, min S %.3g, max X %.6g, min W %.6g\n", r.worst_handshake(),
                r.ledger.invariants.min_C, r.ledger.invariants.min_S, r.ledger.invariants.max_X,
                r.ledger.invariants.min_W);
    std::printf("  outputs in %s\n", out_dir.c_str());
    if (!r.closed()) {
        std::fprintf(stderr, "ledger not closed: worst residual %.3e, tolerance %.1e\n", r.worst_closure(), r.tolerance);
        return kLedgerOpen;
    }
    return kOk;
}

int validate(const std::string& path) {
    const sbr::Scenario sc = resolve(path);
    const double T = sc.stages.empty() ? 0.0 : sc.stages.back().t_end;
    std::printf("%s: valid, %zu stages over %.6g h, N = %zu\n", sc.name.c_str(), sc.stages.size(), T / 3600.0,
                sc.cells);
    return kOk;
}

int export_examples(const std::string& dir) {
    fs::create_directories(dir);
    for (const auto& [file, text] : sbr::bundled_scenarios()) {
        const fs::path p = fs::path(dir) / file;
        std::ofstream out(p, std::ios::binary);
        out << text;
        if (!out) {
            std::fprintf(stderr, "cannot write %s\n", p.c_str());
            return kIo;
        }
        std::printf("%s\n", p.c_str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reactive settling simulator for sequencing batch reactors"};
    app.require_subcommand(1);

    std::string scenario, out_dir = "out", export_dir;
    std::size_t cells = 0;

    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write outlets.csv, fields.csv, ledger.json");
    run_cmd->add_option("scenario", scenario, "Scenario file or bundled name")->required();
    run_cmd->add_option("--cells", cells, "Override the number of cells");
    run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("scenario", scenario, "Scenario file or bundled name")->required();

    auto* examples_cmd = app.add_subcommand("examples", "Bundled example scenarios");
    examples_cmd->require_subcommand(1);
    auto* export_cmd = examples_cmd->add_subcommand("export", "Write the bundled scenarios to a directory");
    export_cmd->add_option("dir", export_dir, "Target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(scenario, cells, out_dir);
        if (*validate_cmd) return validate(scenario);
        if (*export_cmd) return export_examples(export_dir);
    } catch (const sbr::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfig;
    } catch (const sbr::StageError& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return kRunFailed;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    }
    return kOk;
}
