// Dense statevector simulation of small qubit registers.
//
// Basis-state indexing: qubit 0 is the most significant bit of the amplitude
// index, so the ket |b0 b1 ... b(k-1)> lives at index b0*2^(k-1) + ... + b(k-1).
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcae/error.hpp"

namespace qcae {

using cplx = std::complex<double>;

inline constexpr int kMaxQubits = 12;

enum class Pauli { X, Y, Z };

enum class GateKind { RX, RY, RZ, Rot, X, CNOT, ZZ };

inline std::string_view to_string(GateKind kind) {
    switch (kind) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::Rot: return "Rot";
        case GateKind::X: return "X";
        case GateKind::CNOT: return "CNOT";
        case GateKind::ZZ: return "ZZ";
    }
    return "?";
}

/// Number of qubits a gate kind acts on.
inline int gate_arity(GateKind kind) {
    return (kind == GateKind::CNOT || kind == GateKind::ZZ) ? 2 : 1;
}

/// Number of real angles a gate kind carries.
inline int gate_param_count(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::ZZ: return 1;
        case GateKind::Rot: return 3;
        case GateKind::X:
        case GateKind::CNOT: return 0;
    }
    return 0;
}

/// A concrete gate with numeric angles (radians).
///
/// Rot(phi, theta, omega) = RZ(omega) RY(theta) RZ(phi); ZZ(theta) = exp(-i theta/2 Z(x)Z).
/// For CNOT, targets = {control, target}.
struct GateOp {
    GateKind kind = GateKind::X;
    std::vector<int> targets;
    std::vector<double> params;

    static GateOp rx(int q, double theta) { return {GateKind::RX, {q}, {theta}}; }
    static GateOp ry(int q, double theta) { return {GateKind::RY, {q}, {theta}}; }
    static GateOp rz(int q, double theta) { return {GateKind::RZ, {q}, {theta}}; }
    static GateOp rot(int q, double phi, double theta, double omega) {
        return {GateKind::Rot, {q}, {phi, theta, omega}};
    }
    static GateOp x(int q) { return {GateKind::X, {q}, {}}; }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, {control, target}, {}}; }
    static GateOp zz(int a, int b, double theta) { return {GateKind::ZZ, {a, b}, {theta}}; }

    bool operator==(const GateOp&) const = default;
};

/// Checks arity, parameter count and qubit indices against a register size.
inline void validate_gate(const GateOp& g, int num_qubits) {
    if (static_cast<int>(g.targets.size()) != gate_arity(g.kind)) {
        throw ConfigError(std::string("gate ") + std::string(to_string(g.kind)) + ": wrong number of targets");
    }
    if (static_cast<int>(g.params.size()) != gate_param_count(g.kind)) {
        throw ConfigError(std::string("gate ") + std::string(to_string(g.kind)) + ": wrong number of parameters");
    }
    for (int q : g.targets) {
        if (q < 0 || q >= num_qubits) {
            throw IndexError("gate " + std::string(to_string(g.kind)) + ": qubit " + std::to_string(q) +
                             " out of range for " + std::to_string(num_qubits) + " qubits");
        }
    }
    if (g.targets.size() == 2 && g.targets[0] == g.targets[1]) {
        throw IndexError("gate " + std::string(to_string(g.kind)) + ": target qubits must be distinct");
    }
}

/// 2x2 single-qubit matrix, row-major.
using Mat2 = std::array<cplx, 4>;

inline Mat2 rotation_matrix(Pauli axis, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    switch (axis) {
        case Pauli::X: return {cplx{c, 0}, cplx{0, -s}, cplx{0, -s}, cplx{c, 0}};
        case Pauli::Y: return {cplx{c, 0}, cplx{-s, 0}, cplx{s, 0}, cplx{c, 0}};
        case Pauli::Z: return {cplx{c, -s}, cplx{0, 0}, cplx{0, 0}, cplx{c, s}};
    }
    return {};
}

inline Mat2 pauli_matrix(Pauli p) {
    switch (p) {
        case Pauli::X: return {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}};
        case Pauli::Y: return {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}};
        case Pauli::Z: return {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}};
    }
    return {};
}

inline Mat2 matmul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// Dense unitary of a gate in its local basis (first target is the most significant bit).
/// Returns a row-major d x d matrix with d = 2^arity.
inline std::vector<cplx> gate_matrix(const GateOp& g) {
    if (static_cast<int>(g.params.size()) != gate_param_count(g.kind)) {
        throw ConfigError(std::string("gate ") + std::string(to_string(g.kind)) + ": wrong number of parameters");
    }
    switch (g.kind) {
        case GateKind::RX: {
            auto m = rotation_matrix(Pauli::X, g.params[0]);
            return {m.begin(), m.end()};
        }
        case GateKind::RY: {
            auto m = rotation_matrix(Pauli::Y, g.params[0]);
            return {m.begin(), m.end()};
        }
        case GateKind::RZ: {
            auto m = rotation_matrix(Pauli::Z, g.params[0]);
            return {m.begin(), m.end()};
        }
        case GateKind::Rot: {
            auto m = matmul(rotation_matrix(Pauli::Z, g.params[2]),
                            matmul(rotation_matrix(Pauli::Y, g.params[1]), rotation_matrix(Pauli::Z, g.params[0])));
            return {m.begin(), m.end()};
        }
        case GateKind::X: {
            auto m = pauli_matrix(Pauli::X);
            return {m.begin(), m.end()};
        }
        case GateKind::CNOT: {
            std::vector<cplx> m(16, 0.0);
            m[0 * 4 + 0] = m[1 * 4 + 1] = m[2 * 4 + 3] = m[3 * 4 + 2] = 1.0;
            return m;
        }
        case GateKind::ZZ: {
            std::vector<cplx> m(16, 0.0);
            const cplx minus = std::polar(1.0, -g.params[0] / 2);
            const cplx plus = std::polar(1.0, g.params[0] / 2);
            m[0] = minus;
            m[5] = plus;
            m[10] = plus;
            m[15] = minus;
            return m;
        }
    }
    return {};
}

/// 2^k complex amplitudes of a k-qubit register.
class StateVector {
public:
    /// |0...0> on k qubits.
    explicit StateVector(int num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw ConfigError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                              std::to_string(kMaxQubits) + "]");
        }
        amps_.assign(std::size_t{1} << num_qubits, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    /// Wraps explicit amplitudes; the length must be a power of two. No normalization is applied.
    static StateVector from_amplitudes(std::vector<cplx> amps) {
        int k = 0;
        while ((std::size_t{1} << k) < amps.size()) ++k;
        if ((std::size_t{1} << k) != amps.size() || k < 1) {
            throw ConfigError("amplitude count must be a power of two >= 2");
        }
        StateVector s(k);
        s.amps_ = std::move(amps);
        return s;
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    cplx& operator[](std::size_t i) { return amps_[i]; }

    /// Bit mask of qubit q inside a basis-state index.
    std::size_t mask(int q) const { return std::size_t{1} << (num_qubits_ - 1 - q); }

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& a : amps_) acc += std::norm(a);
        return acc;
    }

    void apply_1q(int q, const Mat2& m) {
        const std::size_t bit = mask(q);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const cplx a0 = amps_[i];
            const cplx a1 = amps_[i | bit];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i | bit] = m[2] * a0 + m[3] * a1;
        }
    }

    /// Real-valued fast path for RY.
    void apply_ry(int q, double theta) {
        const double c = std::cos(theta / 2);
        const double s = std::sin(theta / 2);
        const std::size_t bit = mask(q);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            const cplx a0 = amps_[i];
            const cplx a1 = amps_[i | bit];
            amps_[i] = c * a0 - s * a1;
            amps_[i | bit] = s * a0 + c * a1;
        }
    }

    void apply_rotation(Pauli axis, int q, double theta) {
        if (axis == Pauli::Y) {
            apply_ry(q, theta);
        } else {
            apply_1q(q, rotation_matrix(axis, theta));
        }
    }

    void apply_pauli(Pauli p, int q) {
        const std::size_t bit = mask(q);
        switch (p) {
            case Pauli::X:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
                }
                break;
            case Pauli::Y:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (i & bit) continue;
                    const cplx a0 = amps_[i];
                    const cplx a1 = amps_[i | bit];
                    amps_[i] = cplx{0, -1} * a1;
                    amps_[i | bit] = cplx{0, 1} * a0;
                }
                break;
            case Pauli::Z:
                for (std::size_t i = 0; i < amps_.size(); ++i) {
                    if (i & bit) amps_[i] = -amps_[i];
                }
                break;
        }
    }

    void apply_cnot(int control, int target) {
        const std::size_t cbit = mask(control);
        const std::size_t tbit = mask(target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
        }
    }

    void apply_zz(int a, int b, double theta) {
        const std::size_t abit = mask(a);
        const std::size_t bbit = mask(b);
        const cplx same = std::polar(1.0, -theta / 2);
        const cplx diff = std::polar(1.0, theta / 2);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const bool pa = (i & abit) != 0;
            const bool pb = (i & bbit) != 0;
            amps_[i] *= (pa == pb) ? same : diff;
        }
    }

    /// Z(x)Z on two qubits (generator of ZZ).
    void apply_zz_pauli(int a, int b) {
        const std::size_t abit = mask(a);
        const std::size_t bbit = mask(b);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            const bool pa = (i & abit) != 0;
            const bool pb = (i & bbit) != 0;
            if (pa != pb) amps_[i] = -amps_[i];
        }
    }

    /// In-place gate application; validates the gate first.
    void apply(const GateOp& g) {
        validate_gate(g, num_qubits_);
        switch (g.kind) {
            case GateKind::RX: apply_rotation(Pauli::X, g.targets[0], g.params[0]); break;
            case GateKind::RY: apply_ry(g.targets[0], g.params[0]); break;
            case GateKind::RZ: apply_rotation(Pauli::Z, g.targets[0], g.params[0]); break;
            case GateKind::Rot:
                apply_rotation(Pauli::Z, g.targets[0], g.params[0]);
                apply_ry(g.targets[0], g.params[1]);
                apply_rotation(Pauli::Z, g.targets[0], g.params[2]);
                break;
            case GateKind::X: apply_pauli(Pauli::X, g.targets[0]); break;
            case GateKind::CNOT: apply_cnot(g.targets[0], g.targets[1]); break;
            case GateKind::ZZ: apply_zz(g.targets[0], g.targets[1], g.params[0]); break;
        }
    }

private:
    int num_qubits_;
    std::vector<cplx> amps_;
};

inline cplx inner_product(const StateVector& bra, const StateVector& ket) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < bra.dim(); ++i) acc += std::conj(bra[i]) * ket[i];
    return acc;
}

/// |0...0> on k qubits, 1 <= k <= 12.
inline StateVector new_state(int num_qubits) { return StateVector(num_qubits); }

inline StateVector apply_gate(StateVector state, const GateOp& g) {
    state.apply(g);
    return state;
}

inline StateVector apply_gates(StateVector state, std::span<const GateOp> gates) {
    for (const auto& g : gates) state.apply(g);
    return state;
}

/// Tensor product of single-qubit Paulis; unlisted qubits are identity.
struct PauliWord {
    std::map<int, Pauli> factors;

    /// Parses one character per qubit from "XYZ" with 'I' or '_' for identity, e.g. "ZXII".
    static PauliWord parse(std::string_view text) {
        PauliWord w;
        for (std::size_t i = 0; i < text.size(); ++i) {
            switch (text[i]) {
                case 'X': w.factors[static_cast<int>(i)] = Pauli::X; break;
                case 'Y': w.factors[static_cast<int>(i)] = Pauli::Y; break;
                case 'Z': w.factors[static_cast<int>(i)] = Pauli::Z; break;
                case 'I':
                case '_': break;
                default:
                    throw ConfigError("invalid Pauli character '" + std::string(1, text[i]) + "' in \"" +
                                      std::string(text) + "\"");
            }
        }
        return w;
    }

    static PauliWord single(int q, Pauli p) {
        PauliWord w;
        w.factors[q] = p;
        return w;
    }

    std::string to_string(int num_qubits) const {
        std::string s(static_cast<std::size_t>(num_qubits), 'I');
        for (const auto& [q, p] : factors) {
            if (q >= 0 && q < num_qubits) s[q] = p == Pauli::X ? 'X' : (p == Pauli::Y ? 'Y' : 'Z');
        }
        return s;
    }

    void validate(int num_qubits) const {
        for (const auto& [q, p] : factors) {
            if (q < 0 || q >= num_qubits) {
                throw IndexError("Pauli word acts on qubit " + std::to_string(q) + " of a " +
                                 std::to_string(num_qubits) + "-qubit register");
            }
        }
    }

    bool operator==(const PauliWord&) const = default;
};

/// O|psi> for a Pauli word O.
inline StateVector apply_pauli_word(StateVector state, const PauliWord& word) {
    word.validate(state.num_qubits());
    for (const auto& [q, p] : word.factors) state.apply_pauli(p, q);
    return state;
}

/// <psi|O|psi> as a complex number; the imaginary part is round-off only.
inline cplx expectation_complex(const StateVector& state, const PauliWord& word) {
    word.validate(state.num_qubits());
    std::size_t flip = 0;
    std::size_t ymask = 0;
    std::size_t zmask = 0;
    for (const auto& [q, p] : word.factors) {
        const std::size_t bit = state.mask(q);
        if (p == Pauli::X || p == Pauli::Y) flip |= bit;
        if (p == Pauli::Y) ymask |= bit;
        if (p == Pauli::Z) zmask |= bit;
    }
    // O|i> = phase(i) |i ^ flip>, with Y|0> = i|1>, Y|1> = -i|0>, Z|1> = -|1>.
    static constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int ny = std::popcount(ymask);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const int y_ones = std::popcount(i & ymask);
        const int z_ones = std::popcount(i & zmask);
        // i^(ny) * (-1)^(y_ones + z_ones)
        cplx phase = kIPow[ny % 4];
        if ((y_ones + z_ones) & 1) phase = -phase;
        acc += std::conj(state[i ^ flip]) * phase * state[i];
    }
    return acc;
}

/// <psi|O|psi> for a Pauli word O; always in [-1, 1] for normalized states.
inline double expectation(const StateVector& state, const PauliWord& word) {
    return expectation_complex(state, word).real();
}

inline void validate_subset(std::span<const int> subset, int num_qubits) {
    if (subset.empty()) throw ConfigError("measurement subset must be non-empty");
    std::uint64_t seen = 0;
    for (int q : subset) {
        if (q < 0 || q >= num_qubits) {
            throw IndexError("measured qubit " + std::to_string(q) + " out of range for " +
                             std::to_string(num_qubits) + " qubits");
        }
        if (seen & (std::uint64_t{1} << q)) throw ConfigError("measurement subset has duplicate qubits");
        seen |= std::uint64_t{1} << q;
    }
}

/// Outcome index of basis state i restricted to `subset` (subset[0] is the most significant bit).
inline std::size_t subset_outcome(const StateVector& state, std::size_t i, std::span<const int> subset) {
    std::size_t out = 0;
    for (int q : subset) out = (out << 1) | ((i & state.mask(q)) ? 1u : 0u);
    return out;
}

/// Marginal Born probabilities over the 2^|subset| outcomes of the listed qubits.
inline std::vector<double> probabilities(const StateVector& state, std::span<const int> subset) {
    validate_subset(subset, state.num_qubits());
    std::vector<double> p(std::size_t{1} << subset.size(), 0.0);
    for (std::size_t i = 0; i < state.dim(); ++i) p[subset_outcome(state, i, subset)] += std::norm(state[i]);
    return p;
}

inline std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) p[i] = std::norm(state[i]);
    return p;
}

/// Draws `shots` i.i.d. computational-basis outcomes over all qubits.
/// Returns outcome index -> count for outcomes that occurred.
template <class Rng>
std::map<std::size_t, std::size_t> sample(const StateVector& state, std::size_t shots, Rng& rng) {
    if (shots == 0) throw DomainError("shots must be positive");
    const auto p = probabilities(state);
    std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t s = 0; s < shots; ++s) ++counts[dist(rng)];
    return counts;
}

}  // namespace qcae
