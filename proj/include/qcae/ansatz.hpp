// Quantum encoder/decoder circuits built from declarative specs.
//
// A circuit is feature encoding -> core layers (optionally re-uploading the
// encoding before each layer) -> optional measurement-weight rotations -> head.
//
// Trainable parameter layout (flat vector):
//   [encoding weights, one block or one block per layer] [core: layers x qubits x (3 | 1)]
//   [measurement weights: one RY per qubit]
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qcae/circuit.hpp"
#include "qcae/error.hpp"
#include "qcae/json_util.hpp"
#include "qcae/linalg.hpp"
#include "qcae/qgrad.hpp"
#include "qcae/qstate.hpp"

namespace qcae {

enum class EncodingKind {
    Basis,                 // X on qubit i iff bit i of (s-1)
    DiscAngle,             // R_a(pi s/M) per qubit
    DiscAngleZ,            // R_Z(pi s/M) R_a(pi s/M) per qubit
    WeightedAngle,         // R_a(w_i s)
    WeightedAngleZ,        // R_Z(w_2i s) R_a(w_2i+1 s)
    FeatureAngle,          // R_a(w_i y_i), one feature per qubit
    FeatureAngleParallel,  // features repeated across qubit groups
    Qaoa,                  // [RX(y), ZZ(w), RY(w)] x layers, then RX(y)
};

enum class RotationKind { GeneralRot, RyOnly };
enum class ReuploadWeights { Shared, PerLayer };
enum class Preprocess { None, Arctan };
enum class ParamRole { EncodingWeight, Core, MeasurementWeight };

struct EncodingSpec {
    EncodingKind kind = EncodingKind::Basis;
    std::array<Pauli, 2> axes{Pauli::Y, Pauli::Y};  // alpha, beta
    bool weighted = false;                          // feature kinds only
    std::vector<int> qubits;                        // empty: default targets
    int layers = 1;                                 // Qaoa only
};

struct CoreLayerSpec {
    RotationKind rotation = RotationKind::GeneralRot;
    std::vector<std::pair<int, int>> entanglers;  // ordered CNOT (control, target) list
    int layers = 1;
    bool reupload = false;
    ReuploadWeights reupload_weights = ReuploadWeights::Shared;
};

struct MeasurementSpec {
    HeadKind head = HeadKind::Expectations;
    std::vector<PauliWord> observables;
    std::vector<int> subset;
    bool measurement_weights = false;
};

struct CircuitSpec {
    int num_qubits = 2;
    EncodingSpec encoding;
    CoreLayerSpec core;
    MeasurementSpec measurement;
    Preprocess preprocess = Preprocess::None;
    int M = 4;
    int input_dim = 0;  // feature kinds; 0 = derived from the encoding
};

/// A 1-based symbol index in [1, M].
struct Symbol {
    int value = 1;
};

using CircuitInput = std::variant<Symbol, std::vector<double>>;

inline bool is_symbol_encoding(EncodingKind k) {
    return k == EncodingKind::Basis || k == EncodingKind::DiscAngle || k == EncodingKind::DiscAngleZ ||
           k == EncodingKind::WeightedAngle || k == EncodingKind::WeightedAngleZ;
}

inline int log2_exact(int m) {
    if (m < 2 || (m & (m - 1)) != 0) throw ConfigError("M must be a power of two >= 2, got " + std::to_string(m));
    int k = 0;
    while ((1 << k) < m) ++k;
    return k;
}

/// ZZ entanglers plus local fields per QAOA layer: 1 for one qubit, 3 for two, 2k for k > 2 (ring).
inline int qaoa_weights_per_layer(int k) {
    if (k == 1) return 1;
    if (k == 2) return 3;
    return 2 * k;
}

namespace detail {

inline std::vector<int> encoding_targets(const CircuitSpec& spec) {
    const auto& e = spec.encoding;
    if (!e.qubits.empty()) return e.qubits;
    int count = 0;
    switch (e.kind) {
        case EncodingKind::Basis: count = log2_exact(spec.M); break;
        case EncodingKind::DiscAngle:
        case EncodingKind::DiscAngleZ:
        case EncodingKind::WeightedAngle:
        case EncodingKind::WeightedAngleZ: count = std::min(2, spec.num_qubits); break;
        case EncodingKind::FeatureAngleParallel: count = spec.num_qubits; break;
        case EncodingKind::FeatureAngle:
        case EncodingKind::Qaoa: count = spec.input_dim > 0 ? spec.input_dim : spec.num_qubits; break;
    }
    std::vector<int> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = i;
    return t;
}

}  // namespace detail

/// Number of real input features the circuit consumes (1 for symbol encodings: the symbol itself).
inline int circuit_input_dim(const CircuitSpec& spec) {
    if (is_symbol_encoding(spec.encoding.kind)) return 1;
    if (spec.input_dim > 0) return spec.input_dim;
    if (spec.encoding.kind == EncodingKind::FeatureAngleParallel) return 2;
    return static_cast<int>(detail::encoding_targets(spec).size());
}

/// Encoding weights in one encoding block.
inline int encoding_weight_count(const CircuitSpec& spec) {
    const int t = static_cast<int>(detail::encoding_targets(spec).size());
    switch (spec.encoding.kind) {
        case EncodingKind::Basis:
        case EncodingKind::DiscAngle:
        case EncodingKind::DiscAngleZ: return 0;
        case EncodingKind::WeightedAngle: return t;
        case EncodingKind::WeightedAngleZ: return 2 * t;
        case EncodingKind::FeatureAngle:
        case EncodingKind::FeatureAngleParallel: return spec.encoding.weighted ? t : 0;
        case EncodingKind::Qaoa: return spec.encoding.layers * qaoa_weights_per_layer(t);
    }
    return 0;
}

inline int encoding_block_count(const CircuitSpec& spec) {
    return (spec.core.reupload && spec.core.reupload_weights == ReuploadWeights::PerLayer) ? spec.core.layers : 1;
}

inline int rotation_params_per_qubit(RotationKind k) { return k == RotationKind::GeneralRot ? 3 : 1; }

/// Closed form: encoding weights + layers * rotation params + measurement weights.
inline std::size_t param_count(const CircuitSpec& spec) {
    const int enc = encoding_weight_count(spec) * encoding_block_count(spec);
    const int core = spec.core.layers * spec.num_qubits * rotation_params_per_qubit(spec.core.rotation);
    const int meas = spec.measurement.measurement_weights ? spec.num_qubits : 0;
    return static_cast<std::size_t>(enc + core + meas);
}

inline std::vector<ParamRole> param_roles(const CircuitSpec& spec) {
    std::vector<ParamRole> roles;
    roles.insert(roles.end(), static_cast<std::size_t>(encoding_weight_count(spec) * encoding_block_count(spec)),
                 ParamRole::EncodingWeight);
    roles.insert(roles.end(),
                 static_cast<std::size_t>(spec.core.layers * spec.num_qubits * rotation_params_per_qubit(spec.core.rotation)),
                 ParamRole::Core);
    if (spec.measurement.measurement_weights) {
        roles.insert(roles.end(), static_cast<std::size_t>(spec.num_qubits), ParamRole::MeasurementWeight);
    }
    return roles;
}

/// Default TX observables: local Z per qubit on 2 qubits; (Z1 X2, Z3 X4) on 4 qubits.
inline std::vector<PauliWord> default_tx_observables(int num_qubits) {
    if (num_qubits == 4) return {PauliWord::parse("ZXII"), PauliWord::parse("IIZX")};
    std::vector<PauliWord> obs;
    for (int q = 0; q < num_qubits; ++q) obs.push_back(PauliWord::single(q, Pauli::Z));
    return obs;
}

/// Output length of the measurement head.
inline std::size_t circuit_output_dim(const CircuitSpec& spec) {
    return spec.measurement.head == HeadKind::Expectations ? spec.measurement.observables.size()
                                                           : (std::size_t{1} << spec.measurement.subset.size());
}

inline void validate(const CircuitSpec& spec) {
    if (spec.num_qubits < 1 || spec.num_qubits > kMaxQubits) {
        throw ConfigError("num_qubits " + std::to_string(spec.num_qubits) + " outside [1, 12]");
    }
    log2_exact(spec.M);
    const auto targets = detail::encoding_targets(spec);
    std::uint64_t seen = 0;
    for (int q : targets) {
        if (q < 0 || q >= spec.num_qubits) throw IndexError("encoding qubit " + std::to_string(q) + " out of range");
        if (seen & (std::uint64_t{1} << q)) throw ConfigError("encoding qubits must be distinct");
        seen |= std::uint64_t{1} << q;
    }
    if (targets.empty()) throw ConfigError("encoding needs at least one qubit");
    const int in_dim = circuit_input_dim(spec);
    switch (spec.encoding.kind) {
        case EncodingKind::Basis:
            if (static_cast<int>(targets.size()) != log2_exact(spec.M)) {
                throw ConfigError("basis encoding needs log2(M) = " + std::to_string(log2_exact(spec.M)) + " qubits");
            }
            break;
        case EncodingKind::FeatureAngle:
        case EncodingKind::Qaoa:
            if (static_cast<int>(targets.size()) != in_dim) {
                throw ConfigError("encoding needs one qubit per input feature (" + std::to_string(in_dim) + ")");
            }
            if (spec.encoding.kind == EncodingKind::Qaoa && spec.encoding.layers < 1) {
                throw ConfigError("qaoa encoding needs at least one layer");
            }
            break;
        case EncodingKind::FeatureAngleParallel:
            if (spec.num_qubits < 4) throw ConfigError("parallel feature encoding needs at least 4 qubits");
            if (static_cast<int>(targets.size()) < in_dim || targets.size() % static_cast<std::size_t>(in_dim) != 0) {
                throw ConfigError("parallel encoding qubit count must be a multiple of the input dimension");
            }
            break;
        default: break;
    }
    if (spec.core.layers < 1) throw ConfigError("core layers must be >= 1");
    for (const auto& [a, b] : spec.core.entanglers) {
        if (a < 0 || b < 0 || a >= spec.num_qubits || b >= spec.num_qubits) {
            throw IndexError("entangler (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
        }
        if (a == b) throw ConfigError("entangler pair must use distinct qubits");
    }
    if (spec.measurement.head == HeadKind::Expectations) {
        if (spec.measurement.observables.empty()) throw ConfigError("expectations head needs observables");
        for (const auto& w : spec.measurement.observables) w.validate(spec.num_qubits);
    } else {
        validate_subset(spec.measurement.subset, spec.num_qubits);
        if ((std::size_t{1} << spec.measurement.subset.size()) < static_cast<std::size_t>(spec.M)) {
            throw ConfigError("probabilities head must have at least M outcomes");
        }
    }
}

namespace detail {

/// Appends one encoding block. For symbol kinds feature 0 carries the symbol value.
inline void append_encoding(std::vector<CircuitOp>& ops, const CircuitSpec& spec, int param_offset, int symbol) {
    const auto& e = spec.encoding;
    const auto targets = encoding_targets(spec);
    const auto axis = [&](std::size_t i) { return e.axes[i % 2]; };
    const double disc = std::numbers::pi / spec.M;
    switch (e.kind) {
        case EncodingKind::Basis: {
            if (symbol < 1 || symbol > spec.M) {
                throw DomainError("symbol " + std::to_string(symbol) + " outside [1, " + std::to_string(spec.M) + "]");
            }
            const int k = static_cast<int>(targets.size());
            const int bits = symbol - 1;
            for (int i = 0; i < k; ++i) {
                if ((bits >> (k - 1 - i)) & 1) ops.push_back(CircuitOp::x(targets[static_cast<std::size_t>(i)]));
            }
            break;
        }
        case EncodingKind::DiscAngle:
            for (std::size_t i = 0; i < targets.size(); ++i) {
                ops.push_back(CircuitOp::rotation(axis(i), targets[i], {disc, -1, 0}));
            }
            break;
        case EncodingKind::DiscAngleZ:
            for (std::size_t i = 0; i < targets.size(); ++i) {
                ops.push_back(CircuitOp::rotation(axis(i), targets[i], {disc, -1, 0}));
                ops.push_back(CircuitOp::rotation(Pauli::Z, targets[i], {disc, -1, 0}));
            }
            break;
        case EncodingKind::WeightedAngle:
            for (std::size_t i = 0; i < targets.size(); ++i) {
                ops.push_back(CircuitOp::rotation(axis(i), targets[i], {1.0, param_offset + static_cast<int>(i), 0}));
            }
            break;
        case EncodingKind::WeightedAngleZ:
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const int p = param_offset + 2 * static_cast<int>(i);
                ops.push_back(CircuitOp::rotation(axis(i), targets[i], {1.0, p + 1, 0}));
                ops.push_back(CircuitOp::rotation(Pauli::Z, targets[i], {1.0, p, 0}));
            }
            break;
        case EncodingKind::FeatureAngle:
        case EncodingKind::FeatureAngleParallel: {
            const std::size_t in_dim = static_cast<std::size_t>(circuit_input_dim(spec));
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const int f = static_cast<int>(i % in_dim);
                const int p = e.weighted ? param_offset + static_cast<int>(i) : -1;
                ops.push_back(CircuitOp::rotation(axis(i % in_dim), targets[i], {1.0, p, f}));
            }
            break;
        }
        case EncodingKind::Qaoa: {
            const int k = static_cast<int>(targets.size());
            const int per_layer = qaoa_weights_per_layer(k);
            const int n_zz = per_layer - k;
            auto embed = [&] {
                for (int i = 0; i < k; ++i) {
                    ops.push_back(CircuitOp::rotation(Pauli::X, targets[static_cast<std::size_t>(i)], {1.0, -1, i}));
                }
            };
            for (int l = 0; l < e.layers; ++l) {
                const int base = param_offset + l * per_layer;
                embed();
                for (int z = 0; z < n_zz; ++z) {
                    ops.push_back(CircuitOp::zz(targets[static_cast<std::size_t>(z)],
                                                targets[static_cast<std::size_t>((z + 1) % k)], {1.0, base + z, -1}));
                }
                for (int i = 0; i < k; ++i) {
                    ops.push_back(CircuitOp::rotation(Pauli::Y, targets[static_cast<std::size_t>(i)], {1.0, base + n_zz + i, -1}));
                }
            }
            embed();
            break;
        }
    }
}

inline void append_core_layer(std::vector<CircuitOp>& ops, const CircuitSpec& spec, int param_offset) {
    const int k = spec.num_qubits;
    for (int q = 0; q < k; ++q) {
        if (spec.core.rotation == RotationKind::GeneralRot) {
            const int p = param_offset + 3 * q;
            ops.push_back(CircuitOp::rotation(Pauli::Z, q, {1.0, p, -1}));
            ops.push_back(CircuitOp::rotation(Pauli::Y, q, {1.0, p + 1, -1}));
            ops.push_back(CircuitOp::rotation(Pauli::Z, q, {1.0, p + 2, -1}));
        } else {
            ops.push_back(CircuitOp::rotation(Pauli::Y, q, {1.0, param_offset + q, -1}));
        }
    }
    for (const auto& [c, t] : spec.core.entanglers) ops.push_back(CircuitOp::cnot(c, t));
}

}  // namespace detail

/// Lowers a spec to an executable circuit. `symbol` is only consulted by basis encoding.
inline CompiledCircuit compile(const CircuitSpec& spec, int symbol = 1) {
    validate(spec);
    CompiledCircuit c;
    c.num_qubits = spec.num_qubits;
    c.num_params = param_count(spec);
    c.num_features = static_cast<std::size_t>(circuit_input_dim(spec));
    const int enc_block = encoding_weight_count(spec);
    const int enc_total = enc_block * encoding_block_count(spec);
    const int per_layer = spec.num_qubits * rotation_params_per_qubit(spec.core.rotation);
    const bool per_layer_enc = spec.core.reupload && spec.core.reupload_weights == ReuploadWeights::PerLayer;

    if (!spec.core.reupload) detail::append_encoding(c.ops, spec, 0, symbol);
    for (int l = 0; l < spec.core.layers; ++l) {
        if (spec.core.reupload) detail::append_encoding(c.ops, spec, per_layer_enc ? l * enc_block : 0, symbol);
        detail::append_core_layer(c.ops, spec, enc_total + l * per_layer);
    }
    if (spec.measurement.measurement_weights) {
        const int base = enc_total + spec.core.layers * per_layer;
        for (int q = 0; q < spec.num_qubits; ++q) c.ops.push_back(CircuitOp::rotation(Pauli::Y, q, {1.0, base + q, -1}));
    }
    c.head.kind = spec.measurement.head;
    c.head.observables = spec.measurement.observables;
    c.head.subset = spec.measurement.subset;
    c.validate();
    return c;
}

/// Real-valued features fed to the compiled circuit (after optional arctan preprocessing).
inline std::vector<double> circuit_features(const CircuitSpec& spec, const CircuitInput& input) {
    if (is_symbol_encoding(spec.encoding.kind)) {
        const auto* s = std::get_if<Symbol>(&input);
        if (!s) throw ConfigError("symbol encoding expects a symbol input");
        if (s->value < 1 || s->value > spec.M) {
            throw DomainError("symbol " + std::to_string(s->value) + " outside [1, " + std::to_string(spec.M) + "]");
        }
        return {static_cast<double>(s->value)};
    }
    const auto* y = std::get_if<std::vector<double>>(&input);
    if (!y) throw ConfigError("feature encoding expects a real feature vector");
    if (static_cast<int>(y->size()) != circuit_input_dim(spec)) {
        throw DomainError("feature vector has " + std::to_string(y->size()) + " entries, encoding expects " +
                          std::to_string(circuit_input_dim(spec)));
    }
    std::vector<double> f = *y;
    if (spec.preprocess == Preprocess::Arctan) {
        for (auto& v : f) v = std::atan(v);
    }
    return f;
}

inline int input_symbol(const CircuitInput& input) {
    const auto* s = std::get_if<Symbol>(&input);
    return s ? s->value : 1;
}

/// Head outputs of the circuit for one input.
inline std::vector<double> run_circuit(const CircuitSpec& spec, std::span<const double> params, const CircuitInput& input) {
    const auto features = circuit_features(spec, input);
    return run(compile(spec, input_symbol(input)), params, features);
}

/// Jacobian (outputs x trainable parameters) by the parameter-shift rule.
inline Matrix shift_grad(const CircuitSpec& spec, std::span<const double> params, const CircuitInput& input) {
    const auto features = circuit_features(spec, input);
    return shift_param_jacobian(compile(spec, input_symbol(input)), params, features);
}

/// Jacobian (outputs x raw input features y), including the arctan preprocessing chain.
inline Matrix input_grad(const CircuitSpec& spec, std::span<const double> params, std::span<const double> y) {
    if (is_symbol_encoding(spec.encoding.kind)) {
        throw ConfigError("input gradient undefined for symbol encodings (inputs are not real-valued angles)");
    }
    const std::vector<double> raw(y.begin(), y.end());
    const auto features = circuit_features(spec, raw);
    Matrix jac = shift_feature_jacobian(compile(spec), params, features);
    if (spec.preprocess == Preprocess::Arctan) {
        for (std::size_t r = 0; r < jac.rows; ++r) {
            for (std::size_t c = 0; c < jac.cols; ++c) jac(r, c) /= 1.0 + raw[c] * raw[c];
        }
    }
    return jac;
}

// Spec-level builders returning concrete gate sequences.

/// X on qubit i iff bit i (most significant first) of s-1 is set; k = log2(M) qubits.
inline std::vector<GateOp> encode_basis(int s, int M) {
    CircuitSpec spec;
    spec.M = M;
    spec.num_qubits = log2_exact(M);
    spec.encoding.kind = EncodingKind::Basis;
    std::vector<CircuitOp> ops;
    detail::append_encoding(ops, spec, 0, s);
    CompiledCircuit c{spec.num_qubits, ops, {}, 0, 1};
    return qcae::bind(c, {}, std::vector<double>{static_cast<double>(s)});
}

/// Discretized angle encoding of a symbol on two qubits, optionally weighted and/or with RZ factors.
inline std::vector<GateOp> encode_disc_angle(int s, int M, bool weighted, bool with_z, std::span<const double> w,
                                             std::array<Pauli, 2> axes = {Pauli::Y, Pauli::Y}) {
    if (s < 1 || s > M) throw DomainError("symbol " + std::to_string(s) + " outside [1, " + std::to_string(M) + "]");
    CircuitSpec spec;
    spec.M = M;
    spec.num_qubits = 2;
    spec.encoding.axes = axes;
    spec.encoding.kind = weighted ? (with_z ? EncodingKind::WeightedAngleZ : EncodingKind::WeightedAngle)
                                  : (with_z ? EncodingKind::DiscAngleZ : EncodingKind::DiscAngle);
    const std::size_t need = static_cast<std::size_t>(encoding_weight_count(spec));
    if (w.size() != need) {
        throw ConfigError("disc-angle encoding expects " + std::to_string(need) + " weights, got " + std::to_string(w.size()));
    }
    std::vector<CircuitOp> ops;
    detail::append_encoding(ops, spec, 0, s);
    CompiledCircuit c{2, ops, {}, need, 1};
    return qcae::bind(c, w, std::vector<double>{static_cast<double>(s)});
}

/// Angle encoding of real features (FeatureAngle or FeatureAngleParallel). Unweighted specs ignore `w`.
inline std::vector<GateOp> encode_features(std::span<const double> y, const EncodingSpec& enc, int num_qubits,
                                           std::span<const double> w) {
    if (enc.kind != EncodingKind::FeatureAngle && enc.kind != EncodingKind::FeatureAngleParallel) {
        throw ConfigError("encode_features requires a feature-angle encoding");
    }
    if (enc.kind == EncodingKind::FeatureAngle && enc.qubits.empty() && static_cast<int>(y.size()) > num_qubits) {
        throw DomainError("feature vector has " + std::to_string(y.size()) + " entries for " +
                          std::to_string(num_qubits) + " qubits");
    }
    CircuitSpec spec;
    spec.num_qubits = num_qubits;
    spec.encoding = enc;
    spec.input_dim = static_cast<int>(y.size());
    const auto targets = detail::encoding_targets(spec);
    if (enc.kind == EncodingKind::FeatureAngle && targets.size() != y.size()) {
        throw DomainError("feature vector has " + std::to_string(y.size()) + " entries for " +
                          std::to_string(targets.size()) + " qubits");
    }
    if (enc.kind == EncodingKind::FeatureAngleParallel && (y.empty() || targets.size() % y.size() != 0)) {
        throw DomainError("parallel encoding qubit count is not a multiple of the feature count");
    }
    const std::size_t need = static_cast<std::size_t>(encoding_weight_count(spec));
    if (w.size() != need) {
        throw ConfigError("feature encoding expects " + std::to_string(need) + " weights, got " + std::to_string(w.size()));
    }
    std::vector<CircuitOp> ops;
    detail::append_encoding(ops, spec, 0, 1);
    CompiledCircuit c{num_qubits, ops, {}, need, y.size()};
    return qcae::bind(c, w, y);
}

/// QAOA-style embedding on |y| qubits; weights hold `layers` blocks of qaoa_weights_per_layer(|y|).
inline std::vector<GateOp> encode_qaoa(std::span<const double> y, std::span<const double> weights) {
    const int k = static_cast<int>(y.size());
    if (k < 1) throw DomainError("qaoa embedding needs at least one feature");
    const int per_layer = qaoa_weights_per_layer(k);
    if (weights.empty() || weights.size() % static_cast<std::size_t>(per_layer) != 0) {
        throw ConfigError("qaoa weights must be a positive multiple of " + std::to_string(per_layer));
    }
    CircuitSpec spec;
    spec.num_qubits = k;
    spec.input_dim = k;
    spec.encoding.kind = EncodingKind::Qaoa;
    spec.encoding.layers = static_cast<int>(weights.size()) / per_layer;
    std::vector<CircuitOp> ops;
    detail::append_encoding(ops, spec, 0, 1);
    CompiledCircuit c{k, ops, {}, weights.size(), y.size()};
    return qcae::bind(c, weights, y);
}

/// `core.layers` core layers on k qubits (no re-encoding; compile() interposes it when reupload is set).
inline std::vector<GateOp> core_layer(const CoreLayerSpec& core, int num_qubits, std::span<const double> weights) {
    CircuitSpec spec;
    spec.num_qubits = num_qubits;
    spec.core = core;
    const std::size_t per_layer = static_cast<std::size_t>(num_qubits * rotation_params_per_qubit(core.rotation));
    if (core.layers < 1) throw ConfigError("core layers must be >= 1");
    if (weights.size() != per_layer * static_cast<std::size_t>(core.layers)) {
        throw ConfigError("core weights: expected " + std::to_string(per_layer * static_cast<std::size_t>(core.layers)) +
                          ", got " + std::to_string(weights.size()));
    }
    std::vector<CircuitOp> ops;
    for (int l = 0; l < core.layers; ++l) detail::append_core_layer(ops, spec, l * static_cast<int>(per_layer));
    CompiledCircuit c{num_qubits, ops, {}, weights.size(), 0};
    c.head.kind = HeadKind::Probabilities;
    c.head.subset = {0};
    c.validate();
    return qcae::bind(c, weights, {});
}

/// Random initial parameters: angles uniform on [0, 2 pi). Symbol-weighted encodings draw
/// from [0, 2 pi / M) so that w * s stays within one period over the alphabet.
template <class Rng>
std::vector<double> init_params(const CircuitSpec& spec, Rng& rng) {
    const auto roles = param_roles(spec);
    std::uniform_real_distribution<double> full(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> symbol_scale(0.0, 2 * std::numbers::pi / spec.M);
    const bool symbol_weights = is_symbol_encoding(spec.encoding.kind);
    std::vector<double> p(roles.size());
    for (std::size_t i = 0; i < roles.size(); ++i) {
        p[i] = (roles[i] == ParamRole::EncodingWeight && symbol_weights) ? symbol_scale(rng) : full(rng);
    }
    return p;
}

// ---- JSON ----

inline std::string to_string(EncodingKind k) {
    switch (k) {
        case EncodingKind::Basis: return "basis";
        case EncodingKind::DiscAngle: return "disc_angle";
        case EncodingKind::DiscAngleZ: return "disc_angle_z";
        case EncodingKind::WeightedAngle: return "weighted_angle";
        case EncodingKind::WeightedAngleZ: return "weighted_angle_z";
        case EncodingKind::FeatureAngle: return "feature_angle";
        case EncodingKind::FeatureAngleParallel: return "feature_angle_parallel";
        case EncodingKind::Qaoa: return "qaoa";
    }
    return "?";
}

inline EncodingKind parse_encoding_kind(const std::string& s, const std::string& path) {
    for (auto k : {EncodingKind::Basis, EncodingKind::DiscAngle, EncodingKind::DiscAngleZ, EncodingKind::WeightedAngle,
                   EncodingKind::WeightedAngleZ, EncodingKind::FeatureAngle, EncodingKind::FeatureAngleParallel,
                   EncodingKind::Qaoa}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("field '" + path + "': unknown encoding kind \"" + s + "\"");
}

inline Pauli parse_axis(const std::string& s, const std::string& path) {
    if (s == "X") return Pauli::X;
    if (s == "Y") return Pauli::Y;
    throw ConfigError("field '" + path + "': axis must be \"X\" or \"Y\"");
}

inline std::string axis_name(Pauli p) { return p == Pauli::X ? "X" : (p == Pauli::Y ? "Y" : "Z"); }

inline json to_json(const CircuitSpec& s) {
    json enc = {{"kind", to_string(s.encoding.kind)},
                {"axes", {axis_name(s.encoding.axes[0]), axis_name(s.encoding.axes[1])}},
                {"weighted", s.encoding.weighted},
                {"qubits", s.encoding.qubits},
                {"layers", s.encoding.layers}};
    json ent = json::array();
    for (const auto& [a, b] : s.core.entanglers) ent.push_back({a, b});
    json core = {{"rotation_kind", s.core.rotation == RotationKind::GeneralRot ? "general_rot" : "ry_only"},
                 {"entanglers", ent},
                 {"layers", s.core.layers},
                 {"reupload", s.core.reupload},
                 {"reupload_weights", s.core.reupload_weights == ReuploadWeights::Shared ? "shared" : "per_layer"}};
    json obs = json::array();
    for (const auto& w : s.measurement.observables) obs.push_back(w.to_string(s.num_qubits));
    json meas = {{"head", s.measurement.head == HeadKind::Expectations ? "expectations" : "probabilities"},
                 {"observables", obs},
                 {"subset", s.measurement.subset},
                 {"measurement_weights", s.measurement.measurement_weights}};
    return {{"num_qubits", s.num_qubits},
            {"encoding", enc},
            {"core", core},
            {"measurement", meas},
            {"preprocess", s.preprocess == Preprocess::None ? "none" : "arctan"},
            {"M", s.M},
            {"input_dim", s.input_dim}};
}

inline CircuitSpec circuit_from_json(const json& j, const std::string& path) {
    using namespace jsonutil;
    CircuitSpec s;
    s.num_qubits = get<int>(j, "num_qubits", path);
    s.M = get<int>(j, "M", path);
    s.input_dim = get_or<int>(j, "input_dim", path, 0);
    const std::string pre = get_or<std::string>(j, "preprocess", path, "none");
    if (pre == "none") {
        s.preprocess = Preprocess::None;
    } else if (pre == "arctan") {
        s.preprocess = Preprocess::Arctan;
    } else {
        throw ConfigError("field '" + join(path, "preprocess") + "': expected \"none\" or \"arctan\"");
    }

    const std::string ep = join(path, "encoding");
    const json& e = require(j, "encoding", path);
    s.encoding.kind = parse_encoding_kind(get<std::string>(e, "kind", ep), join(ep, "kind"));
    const auto axes = get_list_or<std::string>(e, "axes", ep, {"Y", "Y"});
    if (axes.size() != 2) throw ConfigError("field '" + join(ep, "axes") + "': expected two axes");
    s.encoding.axes = {parse_axis(axes[0], join(ep, "axes[0]")), parse_axis(axes[1], join(ep, "axes[1]"))};
    s.encoding.weighted = get_or<bool>(e, "weighted", ep, false);
    s.encoding.qubits = get_list_or<int>(e, "qubits", ep, {});
    s.encoding.layers = get_or<int>(e, "layers", ep, 1);

    const std::string cp = join(path, "core");
    const json& c = require(j, "core", path);
    const std::string rk = get_or<std::string>(c, "rotation_kind", cp, "general_rot");
    if (rk == "general_rot") {
        s.core.rotation = RotationKind::GeneralRot;
    } else if (rk == "ry_only") {
        s.core.rotation = RotationKind::RyOnly;
    } else {
        throw ConfigError("field '" + join(cp, "rotation_kind") + "': expected \"general_rot\" or \"ry_only\"");
    }
    if (c.contains("entanglers")) {
        const json& ent = c.at("entanglers");
        const std::string entp = join(cp, "entanglers");
        if (!ent.is_array()) throw ConfigError("field '" + entp + "': expected array of pairs");
        for (std::size_t i = 0; i < ent.size(); ++i) {
            const std::string ip = entp + "[" + std::to_string(i) + "]";
            if (!ent[i].is_array() || ent[i].size() != 2) throw ConfigError("field '" + ip + "': expected [control, target]");
            s.core.entanglers.emplace_back(jsonutil::as<int>(ent[i][0], ip), jsonutil::as<int>(ent[i][1], ip));
        }
    }
    s.core.layers = get_or<int>(c, "layers", cp, 1);
    s.core.reupload = get_or<bool>(c, "reupload", cp, false);
    const std::string rw = get_or<std::string>(c, "reupload_weights", cp, "shared");
    if (rw == "shared") {
        s.core.reupload_weights = ReuploadWeights::Shared;
    } else if (rw == "per_layer") {
        s.core.reupload_weights = ReuploadWeights::PerLayer;
    } else {
        throw ConfigError("field '" + join(cp, "reupload_weights") + "': expected \"shared\" or \"per_layer\"");
    }

    const std::string mp = join(path, "measurement");
    const json& m = require(j, "measurement", path);
    const std::string head = get<std::string>(m, "head", mp);
    if (head == "expectations") {
        s.measurement.head = HeadKind::Expectations;
    } else if (head == "probabilities") {
        s.measurement.head = HeadKind::Probabilities;
    } else {
        throw ConfigError("field '" + join(mp, "head") + "': expected \"expectations\" or \"probabilities\"");
    }
    for (const auto& w : get_list_or<std::string>(m, "observables", mp, {})) {
        s.measurement.observables.push_back(PauliWord::parse(w));
    }
    s.measurement.subset = get_list_or<int>(m, "subset", mp, {});
    s.measurement.measurement_weights = get_or<bool>(m, "measurement_weights", mp, false);
    try {
        validate(s);
    } catch (const std::exception& ex) {
        throw ConfigError("field '" + path + "': " + ex.what());
    }
    return s;
}

}  // namespace qcae
