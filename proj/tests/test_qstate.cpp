#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "qcae/qstate.hpp"

using namespace qcae;
using std::numbers::pi;

namespace {

// Random gate on k qubits together with its dense oracle operator.
struct RandomGate {
    GateOp op;
    oracle::Dense dense;
};

RandomGate random_gate(std::mt19937_64& rng, int k) {
    std::uniform_int_distribution<int> kind(0, k > 1 ? 6 : 4);
    std::uniform_int_distribution<int> qubit(0, k - 1);
    std::uniform_real_distribution<double> angle(-2 * pi, 2 * pi);
    const int q = qubit(rng);
    int r = q;
    while (k > 1 && r == q) r = qubit(rng);
    switch (kind(rng)) {
        case 0: {
            const double t = angle(rng);
            return {GateOp::rx(q, t), oracle::on_qubit(oracle::rot(oracle::pauli_x(), t), q, k)};
        }
        case 1: {
            const double t = angle(rng);
            return {GateOp::ry(q, t), oracle::on_qubit(oracle::rot(oracle::pauli_y(), t), q, k)};
        }
        case 2: {
            const double t = angle(rng);
            return {GateOp::rz(q, t), oracle::on_qubit(oracle::rot(oracle::pauli_z(), t), q, k)};
        }
        case 3: {
            const double a = angle(rng), b = angle(rng), c = angle(rng);
            auto u = oracle::mul(oracle::rot(oracle::pauli_z(), c),
                                 oracle::mul(oracle::rot(oracle::pauli_y(), b), oracle::rot(oracle::pauli_z(), a)));
            return {GateOp::rot(q, a, b, c), oracle::on_qubit(u, q, k)};
        }
        case 4: return {GateOp::x(q), oracle::on_qubit(oracle::pauli_x(), q, k)};
        case 5: return {GateOp::cnot(q, r), oracle::cnot(q, r, k)};
        default: {
            const double t = angle(rng);
            return {GateOp::zz(q, r, t), oracle::zz(q, r, t, k)};
        }
    }
}

void expect_state_near(const StateVector& s, const std::vector<oracle::cplx>& ref, double tol) {
    ASSERT_EQ(s.dim(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_NEAR(s[i].real(), ref[i].real(), tol) << "index " << i;
        EXPECT_NEAR(s[i].imag(), ref[i].imag(), tol) << "index " << i;
    }
}

}  // namespace

TEST(NewState, ZeroStateForSeveralSizes) {
    for (int k : {1, 2, 4}) {
        const auto s = new_state(k);
        ASSERT_EQ(s.dim(), std::size_t{1} << k);
        EXPECT_EQ(s[0], cplx(1.0, 0.0));
        for (std::size_t i = 1; i < s.dim(); ++i) EXPECT_EQ(s[i], cplx(0.0, 0.0));
    }
}

TEST(NewState, RejectsOutOfRangeQubitCounts) {
    EXPECT_THROW(new_state(0), ConfigError);
    EXPECT_THROW(new_state(13), ConfigError);
    EXPECT_NO_THROW(new_state(12));
}

TEST(ApplyGate, XOnQubitZeroIsLeftmostBit) {
    const auto s = apply_gate(new_state(2), GateOp::x(0));
    EXPECT_NEAR(std::abs(s[0b10]), 1.0, 1e-15);
}

TEST(ApplyGate, RyPiFlipsToOne) {
    const auto s = apply_gate(new_state(1), GateOp::ry(0, pi));
    EXPECT_NEAR(std::norm(s[1]), 1.0, 1e-15);
    EXPECT_NEAR(expectation(s, PauliWord::parse("Z")), -1.0, 1e-12);
}

TEST(ApplyGate, CnotBuildsBellState) {
    auto s = StateVector::from_amplitudes({1 / std::sqrt(2.0), 0, 1 / std::sqrt(2.0), 0});
    s = apply_gate(s, GateOp::cnot(0, 1));
    EXPECT_NEAR(s[0b00].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[0b11].real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(s[0b01]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(s[0b10]), 0.0, 1e-15);
}

TEST(ApplyGate, BadTargetsAreIndexErrors) {
    EXPECT_THROW(apply_gate(new_state(2), GateOp::rx(2, 0.1)), IndexError);
    EXPECT_THROW(apply_gate(new_state(2), GateOp::cnot(0, 5)), IndexError);
    EXPECT_THROW(apply_gate(new_state(2), GateOp::zz(-1, 1, 0.3)), IndexError);
    EXPECT_THROW(apply_gate(new_state(2), GateOp::cnot(1, 1)), IndexError);
}

TEST(ApplyGate, MalformedGatesAreConfigErrors) {
    GateOp bad{GateKind::RX, {0}, {}};
    EXPECT_THROW(apply_gate(new_state(1), bad), ConfigError);
}

TEST(ApplyGate, MatchesDenseOracleOnRandomPrograms) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const int k = 1 + trial % 4;
        auto s = new_state(k);
        auto ref = oracle::zero_state(k);
        for (int g = 0; g < 25; ++g) {
            const auto rg = random_gate(rng, k);
            s = apply_gate(s, rg.op);
            ref = oracle::apply(rg.dense, ref);
        }
        expect_state_near(s, ref, 1e-12);
    }
}

TEST(GateMatrix, EveryKindIsUnitary) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(-7, 7);
    const std::vector<GateOp> gates = {GateOp::rx(0, a(rng)),  GateOp::ry(0, a(rng)), GateOp::rz(0, a(rng)),
                                       GateOp::rot(0, a(rng), a(rng), a(rng)), GateOp::x(0), GateOp::cnot(0, 1),
                                       GateOp::zz(0, 1, a(rng))};
    for (const auto& g : gates) {
        const auto m = gate_matrix(g);
        const std::size_t d = m.size() == 4 ? 2 : 4;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                cplx acc = 0.0;
                for (std::size_t r = 0; r < d; ++r) acc += std::conj(m[r * d + i]) * m[r * d + j];
                EXPECT_NEAR(std::abs(acc - (i == j ? 1.0 : 0.0)), 0.0, 1e-12) << to_string(g.kind);
            }
        }
    }
}

TEST(GateMatrix, RotIsZyzComposition) {
    const double phi = 0.3, theta = -1.1, omega = 2.4;
    const auto m = gate_matrix(GateOp::rot(0, phi, theta, omega));
    const auto ref = oracle::mul(oracle::rot(oracle::pauli_z(), omega),
                                 oracle::mul(oracle::rot(oracle::pauli_y(), theta), oracle::rot(oracle::pauli_z(), phi)));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(m[i * 2 + j] - ref[i][j]), 0.0, 1e-14);
}

TEST(StateVector, NormPreservedOverLongRandomPrograms) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + trial % 4;
        auto s = new_state(k);
        for (int g = 0; g < 100; ++g) s.apply(random_gate(rng, k).op);
        EXPECT_LT(std::abs(s.norm_squared() - 1.0), 1e-10);
    }
}

TEST(Expectation, BasisStates) {
    EXPECT_NEAR(expectation(new_state(2), PauliWord::single(0, Pauli::Z)), 1.0, 1e-15);
    const auto s01 = apply_gate(new_state(2), GateOp::x(1));
    EXPECT_NEAR(expectation(s01, PauliWord::single(0, Pauli::Z)), 1.0, 1e-15);
    EXPECT_NEAR(expectation(s01, PauliWord::single(1, Pauli::Z)), -1.0, 1e-15);
}

TEST(Expectation, BellCorrelations) {
    const auto bell = StateVector::from_amplitudes({1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)});
    EXPECT_NEAR(expectation(bell, PauliWord::parse("ZZ")), 1.0, 1e-12);
    EXPECT_NEAR(expectation(bell, PauliWord::parse("ZI")), 0.0, 1e-12);
    EXPECT_NEAR(expectation(bell, PauliWord::parse("XX")), 1.0, 1e-12);
    EXPECT_NEAR(expectation(bell, PauliWord::parse("YY")), -1.0, 1e-12);
}

TEST(Expectation, MatchesDenseOracleForRandomWords) {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> letter(0, 3);
    for (int trial = 0; trial < 60; ++trial) {
        const int k = 1 + trial % 4;
        auto s = new_state(k);
        auto ref = oracle::zero_state(k);
        for (int g = 0; g < 20; ++g) {
            const auto rg = random_gate(rng, k);
            s.apply(rg.op);
            ref = oracle::apply(rg.dense, ref);
        }
        std::string text;
        oracle::Dense obs = {{1.0}};
        for (int q = 0; q < k; ++q) {
            const int l = letter(rng);
            text += "IXYZ"[l];
            obs = oracle::kron(obs, l == 0 ? oracle::identity(2)
                                    : l == 1 ? oracle::pauli_x()
                                    : l == 2 ? oracle::pauli_y()
                                             : oracle::pauli_z());
        }
        const auto word = PauliWord::parse(text);
        const cplx got = expectation_complex(s, word);
        const cplx want = oracle::expect(obs, ref);
        EXPECT_NEAR(got.real(), want.real(), 1e-12) << text;
        EXPECT_NEAR(got.imag(), 0.0, 1e-12) << text;
        EXPECT_LE(std::abs(expectation(s, word)), 1.0 + 1e-12);
    }
}

TEST(Expectation, ZWordsAgreeWithParityOfProbabilities) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 2 + trial % 3;
        auto s = new_state(k);
        for (int g = 0; g < 30; ++g) s.apply(random_gate(rng, k).op);
        const auto p = probabilities(s);
        for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
            PauliWord w;
            for (int q = 0; q < k; ++q) {
                if (mask & (std::size_t{1} << (k - 1 - q))) w.factors[q] = Pauli::Z;
            }
            double parity_sum = 0.0;
            for (std::size_t b = 0; b < p.size(); ++b) parity_sum += (std::popcount(b & mask) % 2 ? -1.0 : 1.0) * p[b];
            EXPECT_NEAR(expectation(s, w), parity_sum, 1e-10);
        }
    }
}

TEST(PauliWord, ParseAndPrintRoundTrip) {
    const auto w = PauliWord::parse("ZXI_Y");
    EXPECT_EQ(w.factors.size(), 3u);
    EXPECT_EQ(w.to_string(5), "ZXIIY");
    EXPECT_THROW(PauliWord::parse("ZQ"), ConfigError);
    EXPECT_THROW(expectation(new_state(2), PauliWord::parse("IIZ")), IndexError);
}

TEST(Probabilities, BellMarginals) {
    const auto bell = StateVector::from_amplitudes({1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)});
    const std::vector<int> both{0, 1};
    const auto p = probabilities(bell, both);
    EXPECT_NEAR(p[0b00], 0.5, 1e-12);
    EXPECT_NEAR(p[0b01], 0.0, 1e-12);
    EXPECT_NEAR(p[0b10], 0.0, 1e-12);
    EXPECT_NEAR(p[0b11], 0.5, 1e-12);
    const std::vector<int> first{0};
    const auto m = probabilities(bell, first);
    EXPECT_NEAR(m[0], 0.5, 1e-12);
    EXPECT_NEAR(m[1], 0.5, 1e-12);
}

TEST(Probabilities, BasisStateIsOneHot) {
    const auto s = apply_gate(new_state(2), GateOp::x(0));
    const std::vector<int> both{0, 1};
    const auto p = probabilities(s, both);
    EXPECT_EQ(p, (std::vector<double>{0, 0, 1, 0}));
}

TEST(Probabilities, SubsetOrderSetsBitSignificance) {
    const auto s = apply_gate(new_state(3), GateOp::x(2));  // |001>
    const std::vector<int> rev{2, 0};
    const auto p = probabilities(s, rev);
    EXPECT_NEAR(p[0b10], 1.0, 1e-15);
}

TEST(Probabilities, InvalidSubsets) {
    const auto s = new_state(2);
    const std::vector<int> empty;
    const std::vector<int> dup{0, 0};
    const std::vector<int> far{3};
    EXPECT_THROW(probabilities(s, empty), ConfigError);
    EXPECT_THROW(probabilities(s, dup), ConfigError);
    EXPECT_THROW(probabilities(s, far), IndexError);
}

TEST(Probabilities, FullRegisterMatchesSquaredAmplitudesAndSumsToOne) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 1 + trial % 4;
        auto s = new_state(k);
        for (int g = 0; g < 30; ++g) s.apply(random_gate(rng, k).op);
        const auto p = probabilities(s);
        double total = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_NEAR(p[i], std::norm(s[i]), 1e-12);
            EXPECT_GE(p[i], 0.0);
            total += p[i];
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
        std::vector<int> subset;
        for (int q = k - 1; q >= 0; q -= 2) subset.push_back(q);
        double sub_total = 0.0;
        for (double v : probabilities(s, subset)) sub_total += v;
        EXPECT_NEAR(sub_total, 1.0, 1e-10);
    }
}

TEST(Sample, DeterministicStateAndSingleShot) {
    std::mt19937_64 rng(1);
    const auto counts = sample(new_state(1), 100, rng);
    ASSERT_EQ(counts.size(), 1u);
    EXPECT_EQ(counts.at(0), 100u);

    const auto plus = apply_gate(new_state(1), GateOp::ry(0, pi / 2));
    const auto one = sample(plus, 1, rng);
    std::size_t total = 0;
    for (const auto& [k, v] : one) total += v;
    EXPECT_EQ(total, 1u);
    EXPECT_THROW(sample(plus, 0, rng), DomainError);
}

TEST(Sample, PlusStateFrequencyConcentrates) {
    std::mt19937_64 rng(123);
    const auto plus = apply_gate(new_state(1), GateOp::ry(0, pi / 2));
    const auto counts = sample(plus, 100000, rng);
    const double f0 = static_cast<double>(counts.at(0)) / 100000.0;
    EXPECT_NEAR(f0, 0.5, 0.01);
}

TEST(Sample, ReproducibleForFixedSeed) {
    auto s = new_state(3);
    s.apply(GateOp::ry(0, 1.0));
    s.apply(GateOp::rx(1, 2.0));
    s.apply(GateOp::cnot(0, 2));
    std::mt19937_64 a(42), b(42);
    EXPECT_EQ(sample(s, 5000, a), sample(s, 5000, b));
}

TEST(Sample, ChiSquareDoesNotReject) {
    std::mt19937_64 gates(99);
    for (int k : {2, 3, 4}) {
        auto s = new_state(k);
        for (int g = 0; g < 30; ++g) s.apply(random_gate(gates, k).op);
        std::mt19937_64 rng(1000 + k);
        const std::size_t shots = 100000;
        const auto counts = sample(s, shots, rng);
        const auto p = probabilities(s);
        double chi2 = 0.0;
        for (std::size_t b = 0; b < p.size(); ++b) {
            const double expected = p[b] * shots;
            const double observed = counts.count(b) ? static_cast<double>(counts.at(b)) : 0.0;
            if (expected > 0.0) chi2 += (observed - expected) * (observed - expected) / expected;
        }
        const int df = (1 << k) - 1;
        EXPECT_LT(chi2, oracle::chi2_crit_999(df)) << "k=" << k;
    }
}
