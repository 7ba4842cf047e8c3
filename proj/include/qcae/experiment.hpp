// Experiment configs, single runs, grid searches and checkpoint sweeps.
//
// A config names a zoo model or defines one inline, plus train / eval / grid blocks.
// Every run writes train.json, sweep.csv, config.resolved.json and timing.json into
// its output directory; the resolved config reproduces the run on its own.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qcae/autoencoder.hpp"
#include "qcae/eval.hpp"
#include "qcae/json_util.hpp"
#include "qcae/zoo.hpp"

namespace qcae {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitDiverged = 3 };

struct GridSpec {
    std::vector<double> lr;
    std::vector<int> layers;
    std::vector<std::string> encodings;
    std::vector<bool> reupload;
    std::vector<std::uint64_t> seeds;

    bool present = false;

    std::size_t size() const {
        auto dim = [](std::size_t n) { return n == 0 ? std::size_t{1} : n; };
        return dim(lr.size()) * dim(layers.size()) * dim(encodings.size()) * dim(reupload.size()) * dim(seeds.size());
    }
    bool empty() const { return lr.empty() && layers.empty() && encodings.empty() && reupload.empty() && seeds.empty(); }
};

struct ExperimentConfig {
    ModelSpec model;
    TrainOptions train;
    SweepOptions eval;
    GridSpec grid;
};

/// Command-line overrides applied on top of a parsed config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<SigmaMode> sigma_mode;
};

namespace detail {

inline json grid_to_json(const GridSpec& g) {
    json j = json::object();
    if (!g.lr.empty()) j["lr"] = g.lr;
    if (!g.layers.empty()) j["layers"] = g.layers;
    if (!g.encodings.empty()) j["encodings"] = g.encodings;
    if (!g.reupload.empty()) j["reupload"] = g.reupload;
    if (!g.seeds.empty()) j["seeds"] = g.seeds;
    return j;
}

inline GridSpec grid_from_json(const json& j, const std::string& path) {
    using namespace jsonutil;
    if (!j.is_object()) throw ConfigError("field '" + path + "': expected object");
    static const std::vector<std::string> known = {"lr", "layers", "encodings", "reupload", "seeds"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw ConfigError("field '" + join(path, it.key()) + "': unknown grid axis");
        }
    }
    GridSpec g;
    g.present = true;
    g.lr = get_list_or<double>(j, "lr", path, {});
    g.layers = get_list_or<int>(j, "layers", path, {});
    g.encodings = get_list_or<std::string>(j, "encodings", path, {});
    g.reupload = get_list_or<bool>(j, "reupload", path, {});
    g.seeds = get_list_or<std::uint64_t>(j, "seeds", path, {});
    for (std::size_t i = 0; i < g.lr.size(); ++i) {
        if (!(g.lr[i] > 0.0)) throw ConfigError("field '" + join(path, "lr") + "[" + std::to_string(i) + "]': must be positive");
    }
    for (std::size_t i = 0; i < g.layers.size(); ++i) {
        if (g.layers[i] < 1) throw ConfigError("field '" + join(path, "layers") + "[" + std::to_string(i) + "]': must be >= 1");
    }
    return g;
}

/// Keeps the channel snapshot in the model consistent with the training block.
inline void sync_channel(ExperimentConfig& c) {
    c.model.channel.ebn0_db = c.train.train_ebn0_db;
    c.model.channel.sigma_mode = c.train.sigma_mode;
    c.model.channel.seed = c.train.seed;
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json j = {{"model", to_json(c.model)},
              {"train",
               {{"steps", c.train.steps},
                {"batch", c.train.batch},
                {"lr", c.train.lr},
                {"train_ebn0_db", c.train.train_ebn0_db},
                {"seed", c.train.seed},
                {"sigma_mode", to_string(c.train.sigma_mode)}}},
              {"eval",
               {{"levels", c.eval.levels},
                {"batches", c.eval.batches},
                {"batch", c.eval.batch},
                {"seed", c.eval.seed},
                {"sigma_mode", to_string(c.eval.sigma_mode)}}}};
    if (c.grid.present) j["grid"] = detail::grid_to_json(c.grid);
    return j;
}

/// Validates and resolves a parsed config document.
inline ExperimentConfig config_from_json(const json& j, const Overrides& ov = {}) {
    using namespace jsonutil;
    if (!j.is_object()) throw ConfigError("config root: expected object");
    ExperimentConfig c;

    const json& m = require(j, "model", "");
    if (m.is_string()) {
        c.model = zoo::find(m.get<std::string>());
    } else {
        c.model = model_from_json(m, "model");
    }

    const json& t = require(j, "train", "");
    c.train.seed = get<std::uint64_t>(t, "seed", "train");
    c.train.steps = get_or<long>(t, "steps", "train", c.model.M > 4 || c.model.channel.family == ChannelFamily::Rayleigh ? 6000 : 2000);
    c.train.batch = get_or<int>(t, "batch", "train", 64);
    c.train.lr = get_or<double>(t, "lr", "train", 0.01);
    c.train.train_ebn0_db = get_or<double>(t, "train_ebn0_db", "train", 15.0);
    try {
        c.train.sigma_mode = parse_sigma_mode(get_or<std::string>(t, "sigma_mode", "train", "paper"));
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("field 'train.sigma_mode': ") + e.what());
    }
    if (c.train.steps < 0) throw ConfigError("field 'train.steps': must be >= 0");
    if (c.train.batch < 1) throw ConfigError("field 'train.batch': must be >= 1");
    if (!(c.train.lr > 0.0)) throw ConfigError("field 'train.lr': must be positive");

    c.eval.seed = c.train.seed;
    c.eval.sigma_mode = c.train.sigma_mode;
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        c.eval.levels = get_list_or<double>(e, "levels", "eval", kDefaultLevels);
        c.eval.batches = get_or<int>(e, "batches", "eval", 10);
        c.eval.batch = get_or<int>(e, "batch", "eval", c.train.batch);
        c.eval.seed = get_or<std::uint64_t>(e, "seed", "eval", c.train.seed);
        try {
            c.eval.sigma_mode = parse_sigma_mode(get_or<std::string>(e, "sigma_mode", "eval", to_string(c.train.sigma_mode)));
        } catch (const ConfigError& err) {
            throw ConfigError(std::string("field 'eval.sigma_mode': ") + err.what());
        }
    } else {
        c.eval.batch = c.train.batch;
    }
    if (c.eval.batches < 10) throw ConfigError("field 'eval.batches': must be >= 10");
    if (c.eval.batch < 1) throw ConfigError("field 'eval.batch': must be >= 1");
    if (c.eval.levels.empty()) throw ConfigError("field 'eval.levels': must not be empty");

    if (j.contains("grid")) c.grid = detail::grid_from_json(j.at("grid"), "grid");

    if (ov.seed) {
        c.train.seed = *ov.seed;
        c.eval.seed = *ov.seed;
    }
    if (ov.sigma_mode) {
        c.train.sigma_mode = *ov.sigma_mode;
        c.eval.sigma_mode = *ov.sigma_mode;
    }
    detail::sync_channel(c);
    validate(c.model);
    return c;
}

/// Parses config text; JSON syntax errors keep the parser's line/column diagnostic.
inline ExperimentConfig parse_config(const std::string& text, const Overrides& ov = {}) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j, ov);
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ExperimentConfig load_config(const std::filesystem::path& p, const Overrides& ov = {}) {
    return parse_config(read_file(p), ov);
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

/// First step whose loss is within 5% of the final (trailing-100 mean) loss.
inline long convergence_step(const std::vector<double>& loss) {
    if (loss.empty()) return 0;
    const std::size_t tail = std::min<std::size_t>(100, loss.size());
    double final_loss = 0.0;
    for (std::size_t i = loss.size() - tail; i < loss.size(); ++i) final_loss += loss[i];
    final_loss /= static_cast<double>(tail);
    for (std::size_t i = 0; i < loss.size(); ++i) {
        if (loss[i] <= 1.05 * final_loss) return static_cast<long>(i);
    }
    return static_cast<long>(loss.size());
}

inline double final_loss(const std::vector<double>& loss) {
    if (loss.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t tail = std::min<std::size_t>(100, loss.size());
    double acc = 0.0;
    for (std::size_t i = loss.size() - tail; i < loss.size(); ++i) acc += loss[i];
    return acc / static_cast<double>(tail);
}

struct RunResult {
    TrainRecord record;
    SweepResult sweep;
    double sweep_seconds = 0.0;
    int exit_code = kExitOk;
};

/// Trains and sweeps one resolved config; writes artifacts when `out` is non-empty.
inline RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& out) {
    RunResult r;
    r.record = train(c.model, c.train);
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_file(out / "config.resolved.json", to_json(c).dump(2) + "\n");
    }
    if (r.record.diverged()) {
        r.exit_code = kExitDiverged;
        if (!out.empty()) write_file(out / "train.json", to_json(r.record).dump(2) + "\n");
        return r;
    }
    const auto t0 = std::chrono::steady_clock::now();
    r.sweep = snr_sweep(restore(r.record), c.eval);
    r.sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.empty()) {
        write_file(out / "train.json", to_json(r.record).dump(2) + "\n");
        write_file(out / "sweep.csv", to_csv(r.sweep));
        json timing = {{"train_seconds", r.record.wall_seconds}, {"sweep_seconds", r.sweep_seconds}};
        write_file(out / "timing.json", timing.dump(2) + "\n");
    }
    return r;
}

/// Param-count summary printed by dry runs and the zoo listing.
inline std::string describe(const ModelSpec& s) {
    const auto tx = s.tx.kind == TxKind::Lookup ? "lookup" : (s.tx.kind == TxKind::Dense ? "dense" : "quantum");
    const auto rx = s.rx.kind == RxKind::Dense ? "dense" : "quantum";
    std::ostringstream os;
    os << std::left << std::setw(14) << s.name << " M=" << std::setw(3) << s.M << "n=" << s.n << "  " << std::setw(9)
       << to_string(s.channel.family) << " TX " << std::setw(8) << tx << std::setw(5) << tx_param_count(s) << " RX "
       << std::setw(8) << rx << std::setw(5) << rx_param_count(s) << " total " << tx_param_count(s) + rx_param_count(s);
    return os.str();
}

// ---- grid ----

struct GridPoint {
    std::size_t index = 0;
    double lr = 0.0;
    std::optional<int> layers;
    std::optional<std::string> encoding;
    std::optional<bool> reupload;
    std::uint64_t seed = 0;
    ExperimentConfig config;
};

struct GridRow {
    GridPoint point;
    std::string status;
    double ser_15db = 1.0;
    std::size_t param_count = 0;
    long convergence = 0;
    double final_loss = 0.0;
    int rank = 0;
};

namespace detail {

inline void apply_to_circuits(ModelSpec& m, const std::function<bool(CircuitSpec&, bool is_tx)>& f, const std::string& what) {
    bool any = false;
    if (m.tx.kind == TxKind::Quantum) any |= f(m.tx.circuit, true);
    if (m.rx.kind == RxKind::Quantum) any |= f(m.rx.circuit, false);
    if (!any) throw ConfigError("field 'grid." + what + "': model " + m.name + " has no matching quantum circuit");
}

}  // namespace detail

/// Expands the grid block into resolved per-point configs (grid block removed).
inline std::vector<GridPoint> expand_grid(const ExperimentConfig& base) {
    const auto& g = base.grid;
    if (!g.present || g.empty()) throw ConfigError("field 'grid': empty grid");
    std::vector<double> lrs = g.lr.empty() ? std::vector<double>{base.train.lr} : g.lr;
    std::vector<std::optional<int>> layers{std::nullopt};
    if (!g.layers.empty()) layers.assign(g.layers.begin(), g.layers.end());
    std::vector<std::optional<std::string>> encs{std::nullopt};
    if (!g.encodings.empty()) encs.assign(g.encodings.begin(), g.encodings.end());
    std::vector<std::optional<bool>> reup{std::nullopt};
    if (!g.reupload.empty()) reup.assign(g.reupload.begin(), g.reupload.end());
    std::vector<std::uint64_t> seeds = g.seeds.empty() ? std::vector<std::uint64_t>{base.train.seed} : g.seeds;

    std::vector<GridPoint> pts;
    for (double lr : lrs) {
        for (const auto& l : layers) {
            for (const auto& e : encs) {
                for (const auto& r : reup) {
                    for (auto seed : seeds) {
                        GridPoint p;
                        p.index = pts.size();
                        p.lr = lr;
                        p.layers = l;
                        p.encoding = e;
                        p.reupload = r;
                        p.seed = seed;
                        p.config = base;
                        p.config.grid = GridSpec{};
                        p.config.train.lr = lr;
                        p.config.train.seed = seed;
                        p.config.eval.seed = seed;
                        auto& m = p.config.model;
                        if (l) {
                            detail::apply_to_circuits(m, [&](CircuitSpec& c, bool) { c.core.layers = *l; return true; },
                                                      "layers");
                        }
                        if (e) {
                            const auto kind = parse_encoding_kind(*e, "grid.encodings");
                            detail::apply_to_circuits(
                                m,
                                [&](CircuitSpec& c, bool) {
                                    if (is_symbol_encoding(kind) != is_symbol_encoding(c.encoding.kind)) return false;
                                    c.encoding.kind = kind;
                                    return true;
                                },
                                "encodings");
                        }
                        if (r) {
                            detail::apply_to_circuits(m, [&](CircuitSpec& c, bool) { c.core.reupload = *r; return true; },
                                                      "reupload");
                        }
                        detail::sync_channel(p.config);
                        try {
                            validate(m);
                        } catch (const std::exception& ex) {
                            throw ConfigError("grid point " + std::to_string(p.index) + ": " + ex.what());
                        }
                        pts.push_back(std::move(p));
                    }
                }
            }
        }
    }
    return pts;
}

/// Orders rows by SER at 15 dB, then parameter count, then convergence step (then point index).
inline void rank_rows(std::vector<GridRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
        const bool da = a.status != "ok";
        const bool db = b.status != "ok";
        if (da != db) return db;
        if (a.ser_15db != b.ser_15db) return a.ser_15db < b.ser_15db;
        if (a.param_count != b.param_count) return a.param_count < b.param_count;
        if (a.convergence != b.convergence) return a.convergence < b.convergence;
        return a.point.index < b.point.index;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = static_cast<int>(i) + 1;
}

inline std::string grid_csv(const std::vector<GridRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "rank,point,lr,layers,encoding,reupload,seed,ser_15db,param_count,convergence_step,final_loss,status\n";
    for (const auto& r : rows) {
        const auto& p = r.point;
        os << r.rank << ",point_" << std::setw(3) << std::setfill('0') << p.index << std::setfill(' ') << ',' << p.lr
           << ',' << (p.layers ? std::to_string(*p.layers) : "") << ',' << (p.encoding ? *p.encoding : "") << ','
           << (p.reupload ? (*p.reupload ? "true" : "false") : "") << ',' << p.seed << ',' << r.ser_15db << ','
           << r.param_count << ',' << r.convergence << ',' << r.final_loss << ',' << r.status << '\n';
    }
    return os.str();
}

inline std::string point_dir_name(std::size_t index) {
    std::ostringstream os;
    os << "point_" << std::setw(3) << std::setfill('0') << index;
    return os.str();
}

/// Runs every grid point on a worker pool; each point owns `<out>/point_NNN/`.
inline std::vector<GridRow> run_grid(const ExperimentConfig& base, const std::filesystem::path& out, unsigned jobs = 0) {
    auto points = expand_grid(base);
    std::vector<GridRow> rows(points.size());
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(points.size()));
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                const auto& p = points[i];
                const auto dir = out.empty() ? std::filesystem::path{} : out / point_dir_name(p.index);
                auto res = run_experiment(p.config, dir);
                GridRow row;
                row.point = p;
                row.status = res.record.status;
                row.param_count = res.record.final_params.size();
                row.convergence = convergence_step(res.record.loss);
                row.final_loss = final_loss(res.record.loss);
                if (!res.record.diverged()) {
                    const auto& lv = p.config.eval.levels;
                    if (std::find(lv.begin(), lv.end(), 15.0) != lv.end()) {
                        row.ser_15db = res.sweep.at(15.0);
                    } else {
                        SweepOptions so = p.config.eval;
                        so.levels = {15.0};
                        row.ser_15db = snr_sweep(restore(res.record), so).points[0].ser;
                    }
                }
                rows[i] = std::move(row);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    rank_rows(rows);
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_file(out / "grid.csv", grid_csv(rows));
    }
    return rows;
}

/// Evaluates the checkpoint stored in a train.json.
inline SweepResult sweep_checkpoint(const std::filesystem::path& train_json, const SweepOptions& opt) {
    json j;
    try {
        j = json::parse(read_file(train_json));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return snr_sweep(restore(record_from_json(j)), opt);
}

/// Default output directory: $QCAE_OUT/<stem>, else runs/<stem>.
inline std::filesystem::path default_out(const std::filesystem::path& config_path) {
    const char* root = std::getenv("QCAE_OUT");
    const std::filesystem::path base = (root && *root) ? std::filesystem::path(root) : std::filesystem::path("runs");
    return base / config_path.stem();
}

}  // namespace qcae
