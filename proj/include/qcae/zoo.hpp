// Built-in model fixtures: the 4-QAM AWGN family, 16-QAM models, and the Rayleigh pair.
#pragma once

#include <string>
#include <vector>

#include "qcae/autoencoder.hpp"

namespace qcae::zoo {

namespace detail {

inline ChannelConfig channel(int M, int n, ChannelFamily family = ChannelFamily::Awgn) {
    ChannelConfig c;
    c.family = family;
    c.n = n;
    c.rate = model_rate(M, n);
    return c;
}

inline ModelSpec base(const std::string& name, int M, int n, ChannelFamily family = ChannelFamily::Awgn) {
    ModelSpec s;
    s.name = name;
    s.M = M;
    s.n = n;
    s.channel = channel(M, n, family);
    return s;
}

inline TxSpec lookup() { return {TxKind::Lookup, {}, {}}; }
inline TxSpec dense_tx(std::vector<int> hidden) { return {TxKind::Dense, std::move(hidden), {}}; }
inline RxSpec dense_rx(std::vector<int> hidden) { return {RxKind::Dense, std::move(hidden), {}}; }

/// Basis-encoded two-qubit TX with one general-rotation layer.
inline CircuitSpec basis_tx(bool entangle) {
    CircuitSpec c;
    c.num_qubits = 2;
    c.M = 4;
    c.encoding.kind = EncodingKind::Basis;
    c.core.rotation = RotationKind::GeneralRot;
    if (entangle) c.core.entanglers = {{0, 1}};
    c.measurement.head = HeadKind::Expectations;
    c.measurement.observables = default_tx_observables(2);
    return c;
}

/// Weighted angle-encoded two-qubit RX with one general-rotation layer.
inline CircuitSpec angle_rx() {
    CircuitSpec c;
    c.num_qubits = 2;
    c.M = 4;
    c.encoding.kind = EncodingKind::FeatureAngle;
    c.encoding.weighted = true;
    c.core.rotation = RotationKind::GeneralRot;
    c.core.entanglers = {{0, 1}};
    c.measurement.head = HeadKind::Probabilities;
    c.measurement.subset = {0, 1};
    return c;
}

inline CircuitSpec qaoa_rx() {
    CircuitSpec c = angle_rx();
    c.encoding.kind = EncodingKind::Qaoa;
    c.encoding.weighted = false;
    c.encoding.layers = 1;
    c.core.layers = 2;
    return c;
}

inline CircuitSpec qam16_tx() {
    CircuitSpec c;
    c.num_qubits = 2;
    c.M = 16;
    c.encoding.kind = EncodingKind::WeightedAngle;
    c.encoding.axes = {Pauli::Y, Pauli::X};  // picked by search on held-out seeds
    c.core.rotation = RotationKind::GeneralRot;
    c.core.entanglers = {{0, 1}};
    c.core.layers = 2;
    c.core.reupload = true;
    c.core.reupload_weights = ReuploadWeights::Shared;
    c.measurement.head = HeadKind::Expectations;
    c.measurement.observables = default_tx_observables(2);
    return c;
}

inline CircuitSpec rayleigh_rx() {
    CircuitSpec c;
    c.num_qubits = 4;
    c.M = 4;
    c.input_dim = 4;
    c.preprocess = Preprocess::Arctan;
    c.encoding.kind = EncodingKind::FeatureAngle;
    c.encoding.weighted = true;
    c.core.rotation = RotationKind::RyOnly;
    c.core.entanglers = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    c.core.layers = 16;
    c.core.reupload = true;
    c.core.reupload_weights = ReuploadWeights::PerLayer;
    c.measurement.head = HeadKind::Probabilities;
    c.measurement.subset = {0, 1};
    c.measurement.measurement_weights = true;
    return c;
}

}  // namespace detail

inline ModelSpec cc1() {
    auto s = detail::base("cc1", 4, 1);
    s.tx = detail::lookup();
    s.rx = detail::dense_rx({2, 2});
    return s;
}

inline ModelSpec cc2() {
    auto s = detail::base("cc2", 4, 1);
    s.tx = detail::lookup();
    s.rx = detail::dense_rx({16, 8});
    return s;
}

inline ModelSpec cc3() {
    auto s = detail::base("cc3", 4, 1);
    s.tx = detail::dense_tx({3});
    s.rx = detail::dense_rx({16, 8});
    return s;
}

inline ModelSpec qc1() {
    auto s = detail::base("qc1", 4, 1);
    s.tx = {TxKind::Quantum, {}, detail::basis_tx(true)};
    s.rx = detail::dense_rx({16, 8});
    return s;
}

inline ModelSpec qc2() {
    auto s = qc1();
    s.name = "qc2";
    s.tx.circuit = detail::basis_tx(false);
    return s;
}

inline ModelSpec cq1() {
    auto s = detail::base("cq1", 4, 1);
    s.tx = detail::lookup();
    s.rx = {RxKind::Quantum, {}, detail::angle_rx()};
    return s;
}

inline ModelSpec cq2() {
    auto s = detail::base("cq2", 4, 1);
    s.tx = detail::lookup();
    s.rx = {RxKind::Quantum, {}, detail::qaoa_rx()};
    return s;
}

inline ModelSpec qq1() {
    auto s = detail::base("qq1", 4, 1);
    s.tx = qc1().tx;
    s.rx = cq1().rx;
    return s;
}

inline ModelSpec cc1_16qam() {
    auto s = detail::base("cc1_16qam", 16, 1);
    s.tx = detail::dense_tx({2});
    s.rx = detail::dense_rx({64, 32});
    return s;
}

inline ModelSpec cc2_16qam() {
    auto s = cc1_16qam();
    s.name = "cc2_16qam";
    s.tx = detail::dense_tx({16});
    return s;
}

inline ModelSpec qc1_16qam() {
    auto s = detail::base("qc1_16qam", 16, 1);
    s.tx = {TxKind::Quantum, {}, detail::qam16_tx()};
    s.rx = detail::dense_rx({64, 32});
    return s;
}

inline ModelSpec cq1_rayleigh() {
    auto s = detail::base("cq1_rayleigh", 4, 2, ChannelFamily::Rayleigh);
    s.tx = detail::lookup();
    s.rx = {RxKind::Quantum, {}, detail::rayleigh_rx()};
    return s;
}

inline ModelSpec cc_rayleigh() {
    auto s = detail::base("cc_rayleigh", 4, 2, ChannelFamily::Rayleigh);
    s.tx = detail::lookup();
    s.rx = detail::dense_rx({14, 4});
    return s;
}

inline std::vector<ModelSpec> all() {
    return {cc1(), cc2(), cc3(), qc1(), qc2(), cq1(), cq2(), qq1(),
            cc1_16qam(), cc2_16qam(), qc1_16qam(), cq1_rayleigh(), cc_rayleigh()};
}

/// Looks up a fixture by name; `<name>_4qam_awgn` aliases the 4-QAM AWGN family.
inline ModelSpec find(const std::string& name) {
    std::string key = name;
    const std::string suffix = "_4qam_awgn";
    if (key.size() > suffix.size() && key.ends_with(suffix)) key.resize(key.size() - suffix.size());
    for (auto& s : all()) {
        if (s.name == key) {
            s.name = name;
            return s;
        }
    }
    throw ConfigError("unknown zoo model '" + name + "'");
}

}  // namespace qcae::zoo
