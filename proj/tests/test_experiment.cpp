#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "qcae/experiment.hpp"

using namespace qcae;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("qcae_experiment_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json small_config(const std::string& model = "cc1") {
    return json::parse(R"({"model": ")" + model + R"(", "train": {"steps": 60, "batch": 16, "seed": 4},
                        "eval": {"levels": [0, 15], "batches": 10, "batch": 16}})");
}

std::string config_error(const json& j) {
    try {
        config_from_json(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ZooNameAndDefaults) {
    const auto c = config_from_json(json::parse(R"({"model": "qq1_4qam_awgn", "train": {"seed": 9}})"));
    EXPECT_EQ(c.model.name, "qq1_4qam_awgn");
    EXPECT_EQ(c.train.steps, 2000);
    EXPECT_EQ(c.train.batch, 64);
    EXPECT_EQ(c.train.lr, 0.01);
    EXPECT_EQ(c.eval.seed, 9u);
    EXPECT_EQ(c.eval.levels, kDefaultLevels);
    EXPECT_FALSE(c.grid.present);
    const auto q16 = config_from_json(json::parse(R"({"model": "qc1_16qam", "train": {"seed": 1}})"));
    EXPECT_EQ(q16.train.steps, 6000);
    const auto ray = config_from_json(json::parse(R"({"model": "cq1_rayleigh", "train": {"seed": 1}})"));
    EXPECT_EQ(ray.train.steps, 6000);
}

TEST(Config, InlineModel) {
    json j = small_config();
    j["model"] = to_json(zoo::cq2());
    const auto c = config_from_json(j);
    EXPECT_EQ(to_json(c.model.rx.circuit), to_json(zoo::cq2().rx.circuit));
}

TEST(Config, ErrorsNameTheField) {
    json j = small_config();
    j["train"].erase("seed");
    EXPECT_NE(config_error(j).find("train.seed"), std::string::npos);

    j = small_config();
    j["train"]["lr"] = -1;
    EXPECT_NE(config_error(j).find("train.lr"), std::string::npos);

    j = small_config();
    j["eval"]["batches"] = 3;
    EXPECT_NE(config_error(j).find("eval.batches"), std::string::npos);

    j = small_config();
    j["train"]["sigma_mode"] = "loud";
    EXPECT_NE(config_error(j).find("train.sigma_mode"), std::string::npos);

    j = small_config("nonexistent");
    EXPECT_NE(config_error(j).find("nonexistent"), std::string::npos);

    j = small_config();
    j["grid"] = {{"depth", {1, 2}}};
    EXPECT_NE(config_error(j).find("grid.depth"), std::string::npos);

    j = small_config();
    j["train"]["steps"] = "many";
    EXPECT_NE(config_error(j).find("train.steps"), std::string::npos);
}

TEST(Config, SyntaxErrorKeepsPosition) {
    try {
        parse_config("{\n  \"model\": \"cc1\",\n  \"train\": {\"seed\": }\n}");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, OverridesApplyToTrainAndEval) {
    Overrides ov;
    ov.seed = 77;
    ov.sigma_mode = SigmaMode::Textbook;
    const auto c = config_from_json(small_config(), ov);
    EXPECT_EQ(c.train.seed, 77u);
    EXPECT_EQ(c.eval.seed, 77u);
    EXPECT_EQ(c.eval.sigma_mode, SigmaMode::Textbook);
    EXPECT_EQ(c.model.channel.sigma_mode, SigmaMode::Textbook);
}

TEST(Config, ResolvedRoundTrip) {
    const auto c = config_from_json(small_config("qq1"));
    const auto again = config_from_json(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Run, WritesArtifactsAndIsDeterministic) {
    const auto c = config_from_json(small_config("qq1"));
    const auto a = scratch("run_a"), b = scratch("run_b");
    EXPECT_EQ(run_experiment(c, a).exit_code, kExitOk);
    EXPECT_EQ(run_experiment(c, b).exit_code, kExitOk);
    for (const auto* f : {"train.json", "sweep.csv", "config.resolved.json", "timing.json"}) {
        EXPECT_TRUE(fs::exists(a / f)) << f;
    }
    EXPECT_EQ(read_file(a / "train.json"), read_file(b / "train.json"));
    EXPECT_EQ(read_file(a / "sweep.csv"), read_file(b / "sweep.csv"));
    EXPECT_EQ(read_file(a / "config.resolved.json"), read_file(b / "config.resolved.json"));
}

TEST(Run, ResolvedConfigIsSelfContained) {
    json j = small_config();
    j["model"] = to_json(zoo::cq1());
    j["model"]["name"] = "custom";
    const auto c = config_from_json(j);
    const auto a = scratch("self_a"), b = scratch("self_b");
    run_experiment(c, a);
    const auto again = load_config(a / "config.resolved.json");
    run_experiment(again, b);
    EXPECT_EQ(read_file(a / "train.json"), read_file(b / "train.json"));
    EXPECT_EQ(read_file(a / "sweep.csv"), read_file(b / "sweep.csv"));
}

TEST(Run, DivergenceExitCode) {
    json j = small_config();
    j["train"]["lr"] = 1e308;
    const auto dir = scratch("diverge");
    const auto r = run_experiment(config_from_json(j), dir);
    EXPECT_EQ(r.exit_code, kExitDiverged);
    const auto rec = json::parse(read_file(dir / "train.json"));
    EXPECT_EQ(rec["status"], "diverged");
    EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

TEST(ConvergenceStep, FirstWithinFivePercent) {
    std::vector<double> loss(200, 1.0);
    for (std::size_t i = 0; i < 50; ++i) loss[i] = 5.0 - 0.05 * static_cast<double>(i);
    // trailing mean is 1.0, so the first step with loss <= 1.05 is the first flat one
    EXPECT_EQ(convergence_step(loss), 50);
    EXPECT_EQ(convergence_step({}), 0);
    EXPECT_DOUBLE_EQ(final_loss(loss), 1.0);
}

TEST(Grid, ExpandsCrossProduct) {
    json j = small_config("qq1");
    j["grid"] = {{"lr", {0.1, 0.01, 0.001}}, {"layers", {1, 2}}};
    const auto pts = expand_grid(config_from_json(j));
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(pts[0].lr, 0.1);
    EXPECT_EQ(pts[1].config.model.tx.circuit.core.layers, 2);
    EXPECT_EQ(pts[1].config.model.rx.circuit.core.layers, 2);
    for (const auto& p : pts) EXPECT_FALSE(p.config.grid.present);
}

TEST(Grid, EncodingAxisMatchesCategory) {
    json j = small_config("qq1");
    j["grid"] = {{"encodings", {"disc_angle", "feature_angle"}}};
    const auto pts = expand_grid(config_from_json(j));
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].config.model.tx.circuit.encoding.kind, EncodingKind::DiscAngle);
    EXPECT_EQ(pts[0].config.model.rx.circuit.encoding.kind, EncodingKind::FeatureAngle);
}

TEST(Grid, Errors) {
    json j = small_config();
    j["grid"] = json::object();
    EXPECT_THROW(expand_grid(config_from_json(j)), ConfigError);
    EXPECT_THROW(expand_grid(config_from_json(small_config())), ConfigError);
    j["grid"] = {{"layers", {2}}};  // cc1 has no circuit
    EXPECT_THROW(expand_grid(config_from_json(j)), ConfigError);
}

TEST(Grid, SinglePointMatchesRun) {
    json j = small_config("cq1");
    const auto run_dir = scratch("single_run"), grid_dir = scratch("single_grid");
    run_experiment(config_from_json(j), run_dir);
    j["grid"] = {{"lr", {0.01}}};
    const auto rows = run_grid(config_from_json(j), grid_dir, 1);
    ASSERT_EQ(rows.size(), 1u);
    const auto pdir = grid_dir / "point_000";
    for (const auto* f : {"train.json", "sweep.csv", "config.resolved.json"}) {
        EXPECT_EQ(read_file(run_dir / f), read_file(pdir / f)) << f;
    }
    EXPECT_TRUE(fs::exists(grid_dir / "grid.csv"));
}

TEST(Grid, LearningRateGridRanksDeterministically) {
    json j = small_config("cc1");
    j["grid"] = {{"lr", {0.1, 0.01, 0.001}}};
    const auto cfg = config_from_json(j);
    const auto a = run_grid(cfg, scratch("lr_a"), 2);
    const auto b = run_grid(cfg, scratch("lr_b"), 1);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(grid_csv(a), grid_csv(b));
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(a[i - 1].ser_15db, a[i].ser_15db);
    EXPECT_EQ(a[0].rank, 1);
}

TEST(Grid, RankingTieBreaks) {
    std::vector<GridRow> rows(4);
    for (std::size_t i = 0; i < 4; ++i) {
        rows[i].point.index = i;
        rows[i].status = "ok";
        rows[i].ser_15db = 0.1;
        rows[i].param_count = 10;
        rows[i].convergence = 100;
    }
    rows[0].status = "diverged";
    rows[0].ser_15db = 0.0;
    rows[1].param_count = 12;
    rows[2].convergence = 50;
    rank_rows(rows);
    EXPECT_EQ(rows[0].point.index, 2u);  // fewer params than 1, faster than 3
    EXPECT_EQ(rows[1].point.index, 3u);
    EXPECT_EQ(rows[2].point.index, 1u);
    EXPECT_EQ(rows[3].point.index, 0u);  // diverged last
}

TEST(Sweep, CheckpointMatchesRunSweep) {
    const auto c = config_from_json(small_config("qq1"));
    const auto dir = scratch("ckpt");
    const auto r = run_experiment(c, dir);
    const auto s = sweep_checkpoint(dir / "train.json", c.eval);
    EXPECT_EQ(to_csv(s), to_csv(r.sweep));
}

TEST(DefaultOut, UsesEnvironment) {
    ::setenv("QCAE_OUT", "/tmp/somewhere", 1);
    EXPECT_EQ(default_out("configs/qq1.json"), fs::path("/tmp/somewhere/qq1"));
    ::unsetenv("QCAE_OUT");
    EXPECT_EQ(default_out("configs/qq1.json"), fs::path("runs/qq1"));
}

TEST(Zoo, DescribeListsCounts) {
    const auto d = describe(zoo::qc1());
    EXPECT_NE(d.find("quantum"), std::string::npos);
    EXPECT_NE(d.find("total 226"), std::string::npos);
    EXPECT_THROW(zoo::find("zz9"), ConfigError);
}
