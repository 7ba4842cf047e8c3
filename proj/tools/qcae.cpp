// qcae: train, sweep and grid-search channel autoencoders from JSON configs.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qcae/experiment.hpp"

namespace fs = std::filesystem;
using namespace qcae;

namespace {

struct GlobalFlags {
    std::string out;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    std::string sigma_mode;
};

Overrides overrides(const GlobalFlags& g) {
    Overrides ov;
    ov.seed = g.seed;
    if (!g.sigma_mode.empty()) ov.sigma_mode = parse_sigma_mode(g.sigma_mode);
    return ov;
}

fs::path out_dir(const GlobalFlags& g, const fs::path& config) {
    return g.out.empty() ? default_out(config) : fs::path(g.out);
}

int cmd_run(const GlobalFlags& g, const fs::path& config) {
    const auto cfg = load_config(config, overrides(g));
    if (g.dry_run) {
        std::cout << describe(cfg.model) << "\n";
        std::cout << "steps " << cfg.train.steps << "  batch " << cfg.train.batch << "  lr " << cfg.train.lr << "  seed "
                  << cfg.train.seed << "  sigma_mode " << to_string(cfg.train.sigma_mode) << "\n";
        return kExitOk;
    }
    const auto dir = out_dir(g, config);
    const auto res = run_experiment(cfg, dir);
    if (res.exit_code == kExitDiverged) {
        std::cerr << "training diverged at step " << res.record.diverged_at << " (non-finite loss); see " << (dir / "train.json")
                  << "\n";
        return kExitDiverged;
    }
    std::cout << cfg.model.name << ": final training SER " << res.record.final_train_ser << ", "
              << res.record.wall_seconds << " s\n"
              << to_csv(res.sweep) << "artifacts in " << dir.string() << "\n";
    return kExitOk;
}

int cmd_grid(const GlobalFlags& g, const fs::path& config, unsigned jobs) {
    const auto cfg = load_config(config, overrides(g));
    const auto points = expand_grid(cfg);
    if (g.dry_run) {
        std::cout << points.size() << " grid points\n";
        for (const auto& p : points) std::cout << point_dir_name(p.index) << "  " << describe(p.config.model) << "\n";
        return kExitOk;
    }
    const auto dir = out_dir(g, config);
    const auto rows = run_grid(cfg, dir, jobs);
    std::cout << grid_csv(rows);
    bool all_diverged = !rows.empty();
    for (const auto& r : rows) all_diverged = all_diverged && r.status != "ok";
    return all_diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const GlobalFlags& g, const fs::path& checkpoint, const std::vector<double>& levels, int batches, int batch) {
    SweepOptions opt;
    if (!levels.empty()) opt.levels = levels;
    opt.batches = batches;
    opt.batch = batch;
    opt.seed = g.seed.value_or(1);
    if (!g.sigma_mode.empty()) opt.sigma_mode = parse_sigma_mode(g.sigma_mode);
    if (g.dry_run) {
        std::cout << "would sweep " << checkpoint.string() << " over " << opt.levels.size() << " levels\n";
        return kExitOk;
    }
    const auto res = sweep_checkpoint(checkpoint, opt);
    const auto csv = to_csv(res);
    if (!g.out.empty()) {
        fs::create_directories(g.out);
        write_file(fs::path(g.out) / "sweep.csv", csv);
    }
    std::cout << csv;
    return kExitOk;
}

int cmd_zoo(const std::string& name, bool as_json) {
    if (!name.empty()) {
        const auto s = zoo::find(name);
        std::cout << (as_json ? to_json(s).dump(2) : describe(s)) << "\n";
        return kExitOk;
    }
    for (const auto& s : zoo::all()) std::cout << describe(s) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum-classical channel autoencoders"};
    app.require_subcommand(1);
    GlobalFlags g;
    app.add_option("--out", g.out, "Output directory (default: $QCAE_OUT/<config name> or runs/<config name>)");
    app.add_option("--seed", g.seed, "Override the master seed");
    app.add_flag("--dry-run", g.dry_run, "Validate and print parameter counts without training");
    app.add_option("--sigma-mode", g.sigma_mode, "Noise mapping: paper or textbook")->check(CLI::IsMember({"paper", "textbook"}));

    std::string config;
    auto* run = app.add_subcommand("run", "Train one model and sweep its SER over Eb/N0");
    run->add_option("config", config, "Experiment config (JSON)")->required();

    unsigned jobs = 0;
    std::string grid_config;
    auto* grid = app.add_subcommand("grid", "Run every point of the config's grid block and rank the results");
    grid->add_option("config", grid_config, "Experiment config with a grid block")->required();
    grid->add_option("--jobs", jobs, "Worker threads (default: hardware concurrency)");

    std::string checkpoint;
    std::vector<double> levels;
    int batches = 10;
    int batch = 64;
    auto* sweep = app.add_subcommand("sweep", "Evaluate the checkpoint stored in a train.json");
    sweep->add_option("train_json", checkpoint, "train.json written by run")->required();
    sweep->add_option("--levels", levels, "Eb/N0 levels in dB");
    sweep->add_option("--batches", batches, "Batches per level (>= 10)");
    sweep->add_option("--batch", batch, "Symbols per batch");

    std::string zoo_name;
    bool zoo_json = false;
    auto* zoo_cmd = app.add_subcommand("zoo", "List the built-in models and their parameter counts");
    zoo_cmd->add_option("name", zoo_name, "Show a single model");
    zoo_cmd->add_flag("--json", zoo_json, "Print the model definition as JSON");

    // Global flags are accepted after the subcommand as well.
    for (auto* sub : {run, grid, sweep, zoo_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(g, config);
        if (*grid) return cmd_grid(g, grid_config, jobs);
        if (*sweep) return cmd_sweep(g, checkpoint, levels, batches, batch);
        if (*zoo_cmd) return cmd_zoo(zoo_name, zoo_json);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}
