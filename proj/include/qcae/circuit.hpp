// Executable parameterized circuits.
//
// A CompiledCircuit is a flat list of primitive operations whose rotation angles
// are products of a constant, at most one trainable parameter and at most one
// input feature. This is the form consumed by the simulator and by every
// gradient routine: each parameterized op is a single-angle rotation generated by
// a Pauli word, so the two-term shift rule and adjoint differentiation apply.
#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qcae/error.hpp"
#include "qcae/qstate.hpp"

namespace qcae {

/// angle = scale * params[param] * features[feature]; a negative index means the factor is 1.
struct AngleExpr {
    double scale = 1.0;
    int param = -1;
    int feature = -1;

    double eval(std::span<const double> params, std::span<const double> features) const {
        double a = scale;
        if (param >= 0) a *= params[static_cast<std::size_t>(param)];
        if (feature >= 0) a *= features[static_cast<std::size_t>(feature)];
        return a;
    }

    bool depends_on_input() const { return param >= 0 || feature >= 0; }

    bool operator==(const AngleExpr&) const = default;
};

enum class OpKind { Rotation, X, CNOT, ZZ };

struct CircuitOp {
    OpKind kind = OpKind::X;
    Pauli axis = Pauli::Z;  // Rotation only
    std::array<int, 2> qubits{0, 0};
    AngleExpr angle;

    static CircuitOp rotation(Pauli axis, int q, AngleExpr angle) { return {OpKind::Rotation, axis, {q, 0}, angle}; }
    static CircuitOp x(int q) { return {OpKind::X, Pauli::X, {q, 0}, {}}; }
    static CircuitOp cnot(int control, int target) { return {OpKind::CNOT, Pauli::X, {control, target}, {}}; }
    static CircuitOp zz(int a, int b, AngleExpr angle) { return {OpKind::ZZ, Pauli::Z, {a, b}, angle}; }

    bool parameterized() const { return kind == OpKind::Rotation || kind == OpKind::ZZ; }

    bool operator==(const CircuitOp&) const = default;
};

enum class HeadKind { Expectations, Probabilities };

struct Head {
    HeadKind kind = HeadKind::Expectations;
    std::vector<PauliWord> observables;  // Expectations
    std::vector<int> subset;             // Probabilities

    std::size_t output_size() const {
        return kind == HeadKind::Expectations ? observables.size() : (std::size_t{1} << subset.size());
    }
};

struct CompiledCircuit {
    int num_qubits = 1;
    std::vector<CircuitOp> ops;
    Head head;
    std::size_t num_params = 0;
    std::size_t num_features = 0;

    /// Checks every qubit, parameter and feature index.
    void validate() const {
        if (num_qubits < 1 || num_qubits > kMaxQubits) throw ConfigError("circuit qubit count out of range");
        auto check_q = [&](int q) {
            if (q < 0 || q >= num_qubits) throw IndexError("circuit op on qubit " + std::to_string(q) + " out of range");
        };
        for (const auto& op : ops) {
            check_q(op.qubits[0]);
            if (op.kind == OpKind::CNOT || op.kind == OpKind::ZZ) {
                check_q(op.qubits[1]);
                if (op.qubits[0] == op.qubits[1]) throw IndexError("two-qubit op on identical qubits");
            }
            if (op.angle.param >= static_cast<int>(num_params)) throw ConfigError("angle references missing parameter");
            if (op.angle.feature >= static_cast<int>(num_features)) throw ConfigError("angle references missing feature");
        }
        if (head.kind == HeadKind::Expectations) {
            if (head.observables.empty()) throw ConfigError("expectations head needs at least one observable");
            for (const auto& w : head.observables) w.validate(num_qubits);
        } else {
            validate_subset(head.subset, num_qubits);
        }
    }
};

inline constexpr std::size_t kNoShift = std::numeric_limits<std::size_t>::max();

inline void apply_op(StateVector& state, const CircuitOp& op, double angle) {
    switch (op.kind) {
        case OpKind::Rotation: state.apply_rotation(op.axis, op.qubits[0], angle); break;
        case OpKind::X: state.apply_pauli(Pauli::X, op.qubits[0]); break;
        case OpKind::CNOT: state.apply_cnot(op.qubits[0], op.qubits[1]); break;
        case OpKind::ZZ: state.apply_zz(op.qubits[0], op.qubits[1], angle); break;
    }
}

/// Applies the Pauli generator P of exp(-i angle/2 P).
inline void apply_generator(StateVector& state, const CircuitOp& op) {
    if (op.kind == OpKind::Rotation) {
        state.apply_pauli(op.axis, op.qubits[0]);
    } else if (op.kind == OpKind::ZZ) {
        state.apply_zz_pauli(op.qubits[0], op.qubits[1]);
    } else {
        throw UnsupportedError("op has no rotation generator");
    }
}

/// Runs the circuit from |0...0>. When `shifted_op` names an op, its angle is offset by `delta`.
inline StateVector execute(const CompiledCircuit& c, std::span<const double> params, std::span<const double> features,
                           std::size_t shifted_op = kNoShift, double delta = 0.0) {
    if (params.size() != c.num_params) {
        throw ConfigError("circuit expects " + std::to_string(c.num_params) + " parameters, got " +
                          std::to_string(params.size()));
    }
    if (features.size() != c.num_features) {
        throw ConfigError("circuit expects " + std::to_string(c.num_features) + " input features, got " +
                          std::to_string(features.size()));
    }
    StateVector state(c.num_qubits);
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        const auto& op = c.ops[i];
        double angle = op.parameterized() ? op.angle.eval(params, features) : 0.0;
        if (i == shifted_op) angle += delta;
        apply_op(state, op, angle);
    }
    return state;
}

inline std::vector<double> evaluate_head(const Head& head, const StateVector& state) {
    if (head.kind == HeadKind::Probabilities) return probabilities(state, head.subset);
    std::vector<double> out;
    out.reserve(head.observables.size());
    for (const auto& w : head.observables) out.push_back(expectation(state, w));
    return out;
}

inline std::vector<double> run(const CompiledCircuit& c, std::span<const double> params,
                               std::span<const double> features) {
    return evaluate_head(c.head, execute(c, params, features));
}

/// Binds numeric angles, producing plain gates.
inline std::vector<GateOp> bind(const CompiledCircuit& c, std::span<const double> params,
                                std::span<const double> features) {
    std::vector<GateOp> gates;
    gates.reserve(c.ops.size());
    for (const auto& op : c.ops) {
        switch (op.kind) {
            case OpKind::Rotation: {
                const double a = op.angle.eval(params, features);
                const int q = op.qubits[0];
                gates.push_back(op.axis == Pauli::X ? GateOp::rx(q, a)
                                                    : (op.axis == Pauli::Y ? GateOp::ry(q, a) : GateOp::rz(q, a)));
                break;
            }
            case OpKind::X: gates.push_back(GateOp::x(op.qubits[0])); break;
            case OpKind::CNOT: gates.push_back(GateOp::cnot(op.qubits[0], op.qubits[1])); break;
            case OpKind::ZZ: gates.push_back(GateOp::zz(op.qubits[0], op.qubits[1], op.angle.eval(params, features))); break;
        }
    }
    return gates;
}

}  // namespace qcae
