#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qcae/eval.hpp"
#include "qcae/zoo.hpp"

using namespace qcae;

namespace {

// Shared trained 4-QAM model; training once keeps the suite fast.
const Model& trained_cc1() {
    static const Model m = [] {
        TrainOptions o;
        o.steps = 2000;
        o.seed = 1;
        o.sigma_mode = SigmaMode::Textbook;
        return restore(train(zoo::cc1(), o));
    }();
    return m;
}

// Adjacent levels may rise by at most `slack`, and at most one such rise is allowed.
bool monotone_with_slack(const std::vector<double>& v, double slack) {
    int inversions = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1]) {
            if (v[i] - v[i - 1] > slack) return false;
            ++inversions;
        }
    }
    return inversions <= 1;
}

}  // namespace

TEST(Ser, Examples) {
    const std::vector<int> t{1, 2, 3, 4};
    EXPECT_EQ(ser(t, t), 0.0);
    const std::vector<int> wrong{2, 3, 4, 1};
    EXPECT_EQ(ser(wrong, t), 1.0);
    const std::vector<int> half{1, 2, 4, 1};
    EXPECT_EQ(ser(half, t), 0.5);
}

TEST(Ser, UniformGuessing) {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> d(1, 4);
    std::vector<int> p(10000), t(10000);
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = d(rng);
        t[i] = d(rng);
    }
    EXPECT_NEAR(ser(p, t), 0.75, 0.02);
}

TEST(Ser, Errors) {
    const std::vector<int> e, one{1}, two{1, 2};
    EXPECT_THROW(ser(e, e), DomainError);
    EXPECT_THROW(ser(one, two), DomainError);
}

TEST(Sweep, NoiselessLimitOnTrainedModel) {
    SweepOptions o;
    o.levels = {60.0};
    o.sigma_mode = SigmaMode::Textbook;
    const auto r = snr_sweep(trained_cc1(), o);
    EXPECT_LE(r.at(60.0), 1.0 / 640.0);
    EXPECT_THROW(r.at(3.0), DomainError);
}

TEST(Sweep, MonotoneTrendWithSlack) {
    SweepOptions o;
    o.sigma_mode = SigmaMode::Textbook;
    const auto r = snr_sweep(trained_cc1(), o);
    std::vector<double> v;
    for (const auto& p : r.points) {
        EXPECT_GE(p.ser, 0.0);
        EXPECT_LE(p.ser, 1.0);
        EXPECT_EQ(p.batches, 10);
        v.push_back(p.ser);
    }
    EXPECT_TRUE(monotone_with_slack(v, 0.01));
}

TEST(Sweep, ReproducibleAndSeedSensitive) {
    SweepOptions o;
    o.levels = {0, 3};
    o.sigma_mode = SigmaMode::Textbook;
    const auto a = snr_sweep(trained_cc1(), o);
    const auto b = snr_sweep(trained_cc1(), o);
    EXPECT_EQ(to_csv(a), to_csv(b));
    o.seed = 2;
    const auto c = snr_sweep(trained_cc1(), o);
    EXPECT_NE(to_csv(a), to_csv(c));
}

TEST(Sweep, LevelsUseIndependentStreams) {
    // Adding a level must not change the SER of the existing ones.
    SweepOptions o;
    o.levels = {0};
    o.sigma_mode = SigmaMode::Textbook;
    const auto a = snr_sweep(trained_cc1(), o);
    o.levels = {0, 6};
    const auto b = snr_sweep(trained_cc1(), o);
    EXPECT_EQ(a.at(0), b.at(0));
}

TEST(Sweep, DoesNotMutateModel) {
    const Model& m = trained_cc1();
    const double before = param_checksum(m);
    const std::vector<double> copy(m.params().begin(), m.params().end());
    snr_sweep(m, SweepOptions{});
    EXPECT_EQ(param_checksum(m), before);
    EXPECT_TRUE(std::equal(copy.begin(), copy.end(), m.params().begin()));
}

TEST(Sweep, RejectsTooFewBatches) {
    SweepOptions o;
    o.batches = 9;
    EXPECT_THROW(snr_sweep(trained_cc1(), o), ConfigError);
}

TEST(Sweep, CsvFormat) {
    SweepOptions o;
    o.levels = {0, 15};
    o.seed = 3;
    o.sigma_mode = SigmaMode::Textbook;
    const auto csv = to_csv(snr_sweep(trained_cc1(), o));
    EXPECT_EQ(csv.rfind("ebn0_db,ser,batches,batch_size,seed,sigma_mode\n", 0), 0u);
    EXPECT_NE(csv.find("\n15,"), std::string::npos);
    EXPECT_NE(csv.find(",10,64,3,textbook\n"), std::string::npos);
}

TEST(Oracle, NoiselessIsZero) {
    const std::vector<double> lv{300.0};
    EXPECT_EQ(qpsk_ml_oracle(lv, 100000, SigmaMode::Textbook)[0], 0.0);
    EXPECT_EQ(qpsk_ml_oracle(lv, 100000, SigmaMode::Paper)[0], 0.0);
}

TEST(Oracle, TextbookHighSnr) {
    const std::vector<double> lv{15.0};
    EXPECT_LT(qpsk_ml_oracle(lv, 100000, SigmaMode::Textbook)[0], 1e-5);
}

TEST(Oracle, StrictlyDecreasing) {
    const std::vector<double> lv{0, 3, 6, 9};
    const auto v = qpsk_ml_oracle(lv, 100000, SigmaMode::Textbook);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]);
    // analytic Gray-coded QPSK: 1 - (1 - Q(sqrt(2 Eb/N0)))^2, from scipy.stats.norm
    EXPECT_NEAR(v[0], 0.1511, 0.005);
    EXPECT_NEAR(v[1], 0.0452, 0.003);
    EXPECT_NEAR(v[2], 0.00477, 0.001);
}

TEST(Oracle, PaperModeIsLessNoisyAboveZeroDb) {
    const std::vector<double> lv{0, 3};
    const auto p = qpsk_ml_oracle(lv, 100000, SigmaMode::Paper);
    const auto t = qpsk_ml_oracle(lv, 100000, SigmaMode::Textbook);
    EXPECT_LT(p[1], t[1]);
    EXPECT_THROW(qpsk_ml_oracle(lv, 0, SigmaMode::Paper), DomainError);
}
