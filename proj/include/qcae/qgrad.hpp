// Gradients of circuit outputs.
//
// Reference path: two-term parameter shift on every parameterized op, then the
// chain rule from op angles to trainable parameters and input features
// (a parameter or feature appearing in several ops accumulates by summation).
// Fast path: adjoint vector-Jacobian product, one forward and one backward sweep.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "qcae/circuit.hpp"
#include "qcae/linalg.hpp"

namespace qcae {

/// d(outputs)/d(angle of op j) for every op (zero columns for unparameterized ops).
inline Matrix angle_jacobian_shift(const CompiledCircuit& c, std::span<const double> params,
                                   std::span<const double> features) {
    const std::size_t nout = c.head.output_size();
    Matrix jac(nout, c.ops.size());
    constexpr double kShift = std::numbers::pi / 2;
    for (std::size_t j = 0; j < c.ops.size(); ++j) {
        if (!c.ops[j].parameterized()) {
            if (c.ops[j].angle.depends_on_input()) {
                throw UnsupportedError("op " + std::to_string(j) + " has a trainable angle but no Pauli generator");
            }
            continue;
        }
        const auto plus = evaluate_head(c.head, execute(c, params, features, j, kShift));
        const auto minus = evaluate_head(c.head, execute(c, params, features, j, -kShift));
        for (std::size_t r = 0; r < nout; ++r) jac(r, j) = 0.5 * (plus[r] - minus[r]);
    }
    return jac;
}

/// Contracts per-op angle derivatives into parameter and feature derivatives.
struct AngleChain {
    Matrix params;
    Matrix features;
};

inline AngleChain chain_angles(const CompiledCircuit& c, const Matrix& angle_jac, std::span<const double> params,
                               std::span<const double> features) {
    AngleChain out{Matrix(angle_jac.rows, c.num_params), Matrix(angle_jac.rows, c.num_features)};
    for (std::size_t j = 0; j < c.ops.size(); ++j) {
        const auto& a = c.ops[j].angle;
        if (!c.ops[j].parameterized()) continue;
        if (a.param >= 0) {
            const double d = a.scale * (a.feature >= 0 ? features[static_cast<std::size_t>(a.feature)] : 1.0);
            for (std::size_t r = 0; r < angle_jac.rows; ++r) out.params(r, static_cast<std::size_t>(a.param)) += angle_jac(r, j) * d;
        }
        if (a.feature >= 0) {
            const double d = a.scale * (a.param >= 0 ? params[static_cast<std::size_t>(a.param)] : 1.0);
            for (std::size_t r = 0; r < angle_jac.rows; ++r) out.features(r, static_cast<std::size_t>(a.feature)) += angle_jac(r, j) * d;
        }
    }
    return out;
}

/// Jacobian (outputs x parameters) by the parameter-shift rule.
inline Matrix shift_param_jacobian(const CompiledCircuit& c, std::span<const double> params,
                                   std::span<const double> features) {
    return chain_angles(c, angle_jacobian_shift(c, params, features), params, features).params;
}

/// Jacobian (outputs x input features) by the parameter-shift rule.
inline Matrix shift_feature_jacobian(const CompiledCircuit& c, std::span<const double> params,
                                     std::span<const double> features) {
    return chain_angles(c, angle_jacobian_shift(c, params, features), params, features).features;
}

struct VjpResult {
    std::vector<double> outputs;
    std::vector<double> params;
    std::vector<double> features;
};

/// Hermitian observable H = sum_r upstream[r] * O_r applied to a state.
inline StateVector apply_weighted_head(const Head& head, const StateVector& state, std::span<const double> upstream) {
    if (head.kind == HeadKind::Probabilities) {
        StateVector out = state;
        for (std::size_t i = 0; i < out.dim(); ++i) out[i] *= upstream[subset_outcome(state, i, head.subset)];
        return out;
    }
    StateVector out = state;
    for (auto& a : out.amplitudes()) a = 0.0;
    for (std::size_t r = 0; r < head.observables.size(); ++r) {
        if (upstream[r] == 0.0) continue;
        const auto term = apply_pauli_word(state, head.observables[r]);
        for (std::size_t i = 0; i < out.dim(); ++i) out[i] += upstream[r] * term[i];
    }
    return out;
}

/// upstream^T d(outputs)/d(params, features) by adjoint differentiation.
inline VjpResult adjoint_vjp(const CompiledCircuit& c, std::span<const double> params, std::span<const double> features,
                             std::span<const double> upstream) {
    StateVector psi = execute(c, params, features);
    VjpResult res;
    res.outputs = evaluate_head(c.head, psi);
    if (upstream.size() != res.outputs.size()) throw ConfigError("upstream gradient has wrong length");
    res.params.assign(c.num_params, 0.0);
    res.features.assign(c.num_features, 0.0);

    StateVector lambda = apply_weighted_head(c.head, psi, upstream);
    StateVector mu = psi;
    for (std::size_t jj = c.ops.size(); jj-- > 0;) {
        const auto& op = c.ops[jj];
        const double angle = op.parameterized() ? op.angle.eval(params, features) : 0.0;
        if (op.parameterized() && op.angle.depends_on_input()) {
            // d/d(angle) <psi|H|psi> = Im <lambda| P |psi_after>
            mu = psi;
            apply_generator(mu, op);
            const double g = inner_product(lambda, mu).imag();
            const auto& a = op.angle;
            if (a.param >= 0) {
                res.params[static_cast<std::size_t>(a.param)] +=
                    g * a.scale * (a.feature >= 0 ? features[static_cast<std::size_t>(a.feature)] : 1.0);
            }
            if (a.feature >= 0) {
                res.features[static_cast<std::size_t>(a.feature)] +=
                    g * a.scale * (a.param >= 0 ? params[static_cast<std::size_t>(a.param)] : 1.0);
            }
        }
        apply_op(psi, op, -angle);
        apply_op(lambda, op, -angle);
    }
    return res;
}

/// Central finite-difference gradient of a scalar map: (f(x + h e_j) - f(x - h e_j)) / 2h.
inline std::vector<double> fd_grad(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> x, double h) {
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> grad(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x0 = xs[j];
        xs[j] = x0 + h;
        const double fp = f(xs);
        xs[j] = x0 - h;
        const double fm = f(xs);
        xs[j] = x0;
        grad[j] = (fp - fm) / (2 * h);
    }
    return grad;
}

/// Central finite-difference Jacobian (outputs x inputs) of a vector map.
inline Matrix fd_jacobian(const std::function<std::vector<double>(std::span<const double>)>& f,
                          std::span<const double> x, double h) {
    if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
    std::vector<double> xs(x.begin(), x.end());
    const std::size_t nout = f(xs).size();
    Matrix jac(nout, xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double x0 = xs[j];
        xs[j] = x0 + h;
        const auto fp = f(xs);
        xs[j] = x0 - h;
        const auto fm = f(xs);
        xs[j] = x0;
        for (std::size_t r = 0; r < nout; ++r) jac(r, j) = (fp[r] - fm[r]) / (2 * h);
    }
    return jac;
}

}  // namespace qcae
