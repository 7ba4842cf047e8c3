// Classical layers with exact backpropagation: dense (ReLU / softmax / linear),
// embedding lookup, and per-symbol power normalization.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qcae/error.hpp"

namespace qcae {

enum class Activation { Relu, Softmax, Linear };

struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<double> weights;  // out_dim x in_dim, row-major
    std::vector<double> bias;     // out_dim
    Activation activation = Activation::Linear;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation act)
        : in_dim(in), out_dim(out), weights(in * out, 0.0), bias(out, 0.0), activation(act) {
        if (in == 0 || out == 0) throw ConfigError("dense layer dimensions must be positive");
    }

    std::size_t param_count() const { return in_dim * out_dim + out_dim; }

    double& w(std::size_t o, std::size_t i) { return weights[o * in_dim + i]; }
    double w(std::size_t o, std::size_t i) const { return weights[o * in_dim + i]; }
};

struct DenseGrads {
    std::vector<double> input;
    std::vector<double> weights;
    std::vector<double> bias;
};

inline std::vector<double> softmax(std::span<const double> z) {
    const double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        p[i] = std::exp(z[i] - zmax);
        total += p[i];
    }
    for (auto& v : p) v /= total;
    return p;
}

inline std::vector<double> dense_preactivation(const DenseLayer& layer, std::span<const double> v) {
    if (v.size() != layer.in_dim) {
        throw DomainError("dense layer expects " + std::to_string(layer.in_dim) + " inputs, got " + std::to_string(v.size()));
    }
    std::vector<double> z(layer.bias);
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
        const double* row = &layer.weights[o * layer.in_dim];
        double acc = 0.0;
        for (std::size_t i = 0; i < layer.in_dim; ++i) acc += row[i] * v[i];
        z[o] += acc;
    }
    return z;
}

inline std::vector<double> activate(Activation act, std::vector<double> z) {
    switch (act) {
        case Activation::Relu:
            for (auto& x : z) x = x > 0.0 ? x : 0.0;
            return z;
        case Activation::Softmax: return softmax(z);
        case Activation::Linear: return z;
    }
    return z;
}

/// activation(W v + b)
inline std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> v) {
    return activate(layer.activation, dense_preactivation(layer, v));
}

/// Backpropagates `upstream` = dL/d(output) through one layer evaluated at input v.
inline DenseGrads dense_backward(const DenseLayer& layer, std::span<const double> v, std::span<const double> upstream) {
    if (upstream.size() != layer.out_dim) {
        throw DomainError("dense backward: upstream has " + std::to_string(upstream.size()) + " entries, expected " +
                          std::to_string(layer.out_dim));
    }
    const auto z = dense_preactivation(layer, v);
    std::vector<double> dz(layer.out_dim);
    switch (layer.activation) {
        case Activation::Relu:
            for (std::size_t o = 0; o < layer.out_dim; ++o) dz[o] = z[o] > 0.0 ? upstream[o] : 0.0;
            break;
        case Activation::Softmax: {
            const auto p = softmax(z);
            double dot = 0.0;
            for (std::size_t o = 0; o < layer.out_dim; ++o) dot += p[o] * upstream[o];
            for (std::size_t o = 0; o < layer.out_dim; ++o) dz[o] = p[o] * (upstream[o] - dot);
            break;
        }
        case Activation::Linear:
            std::copy(upstream.begin(), upstream.end(), dz.begin());
            break;
    }
    DenseGrads g;
    g.input.assign(layer.in_dim, 0.0);
    g.weights.assign(layer.weights.size(), 0.0);
    g.bias = dz;
    for (std::size_t o = 0; o < layer.out_dim; ++o) {
        if (dz[o] == 0.0) continue;
        for (std::size_t i = 0; i < layer.in_dim; ++i) {
            g.weights[o * layer.in_dim + i] = dz[o] * v[i];
            g.input[i] += layer.w(o, i) * dz[o];
        }
    }
    return g;
}

/// Fused softmax + cross-entropy gradient with respect to the logits: p - onehot(s).
inline std::vector<double> softmax_xent_logit_grad(std::span<const double> p, int s) {
    std::vector<double> g(p.begin(), p.end());
    g.at(static_cast<std::size_t>(s - 1)) -= 1.0;
    return g;
}

/// Glorot-style symmetric uniform init: U[-sqrt(6/(in+out)), +sqrt(6/(in+out))], zero bias.
template <class Rng>
void init_dense(DenseLayer& layer, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& w : layer.weights) w = dist(rng);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

/// Stack of dense layers: ReLU hidden layers and a configurable output activation.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::size_t in_dim, const std::vector<int>& hidden, std::size_t out_dim, Activation output) {
        std::size_t prev = in_dim;
        for (int h : hidden) {
            if (h <= 0) throw ConfigError("hidden layer sizes must be positive");
            layers_.emplace_back(prev, static_cast<std::size_t>(h), Activation::Relu);
            prev = static_cast<std::size_t>(h);
        }
        layers_.emplace_back(prev, out_dim, output);
    }

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) n += l.param_count();
        return n;
    }

    template <class Rng>
    void init(Rng& rng) {
        for (auto& l : layers_) init_dense(l, rng);
    }

    /// Layer inputs (activations[0] = input) followed by the final output.
    std::vector<std::vector<double>> forward_all(std::span<const double> v) const {
        std::vector<std::vector<double>> acts;
        acts.emplace_back(v.begin(), v.end());
        for (const auto& l : layers_) acts.push_back(dense_forward(l, acts.back()));
        return acts;
    }

    std::vector<double> forward(std::span<const double> v) const { return forward_all(v).back(); }

    /// Accumulates parameter gradients into `grad` (flat, same layout as write_params) and returns dL/dinput.
    std::vector<double> backward(const std::vector<std::vector<double>>& acts, std::span<const double> upstream,
                                 std::span<double> grad) const {
        std::vector<double> g(upstream.begin(), upstream.end());
        std::size_t offset = param_count();
        for (std::size_t li = layers_.size(); li-- > 0;) {
            const auto& l = layers_[li];
            offset -= l.param_count();
            auto dg = dense_backward(l, acts[li], g);
            for (std::size_t k = 0; k < dg.weights.size(); ++k) grad[offset + k] += dg.weights[k];
            for (std::size_t k = 0; k < dg.bias.size(); ++k) grad[offset + dg.weights.size() + k] += dg.bias[k];
            g = std::move(dg.input);
        }
        return g;
    }

    /// Flat layout: for each layer, weights (row-major) then bias.
    void write_params(std::span<double> out) const {
        std::size_t k = 0;
        for (const auto& l : layers_) {
            for (double w : l.weights) out[k++] = w;
            for (double b : l.bias) out[k++] = b;
        }
    }

    void read_params(std::span<const double> in) {
        std::size_t k = 0;
        for (auto& l : layers_) {
            for (double& w : l.weights) w = in[k++];
            for (double& b : l.bias) b = in[k++];
        }
    }

private:
    std::vector<DenseLayer> layers_;
};

/// M x dim embedding table; row s-1 is the code for symbol s.
struct LookupEncoder {
    int M = 4;
    std::size_t dim = 2;
    std::vector<double> table;

    LookupEncoder() = default;
    LookupEncoder(int m, std::size_t d) : M(m), dim(d), table(static_cast<std::size_t>(m) * d, 0.0) {
        if (m < 1 || d == 0) throw ConfigError("lookup table dimensions must be positive");
    }

    std::size_t param_count() const { return table.size(); }

    template <class Rng>
    void init(Rng& rng) {
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& v : table) v = dist(rng);
    }
};

inline std::vector<double> lookup_forward(const LookupEncoder& enc, int s) {
    if (s < 1 || s > enc.M) {
        throw DomainError("symbol " + std::to_string(s) + " outside [1, " + std::to_string(enc.M) + "]");
    }
    const auto first = enc.table.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(s - 1) * enc.dim);
    return {first, first + static_cast<std::ptrdiff_t>(enc.dim)};
}

/// Adds dL/d(row s-1) into a table-shaped gradient.
inline void lookup_backward(const LookupEncoder& enc, int s, std::span<const double> upstream, std::span<double> grad) {
    const std::size_t base = static_cast<std::size_t>(s - 1) * enc.dim;
    for (std::size_t i = 0; i < enc.dim; ++i) grad[base + i] += upstream[i];
}

/// Scales x to ||x||^2 = n (unit average power per channel use).
inline std::vector<double> normalize(std::span<const double> x, int n) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    if (!(sq > 0.0)) throw DegenerateInputError("cannot normalize a zero-energy transmit vector");
    const double scale = std::sqrt(static_cast<double>(n) / sq);
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v *= scale;
    return out;
}

/// dL/dx through normalize(x): sqrt(n)/||x|| * (g - (x.g / ||x||^2) x).
inline std::vector<double> normalize_backward(std::span<const double> x, std::span<const double> upstream, int n) {
    double sq = 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sq += x[i] * x[i];
        dot += x[i] * upstream[i];
    }
    if (!(sq > 0.0)) throw DegenerateInputError("cannot normalize a zero-energy transmit vector");
    const double scale = std::sqrt(static_cast<double>(n) / sq);
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = scale * (upstream[i] - dot / sq * x[i]);
    return g;
}

/// One-hot vector of length M for symbol s.
inline std::vector<double> one_hot(int s, int M) {
    if (s < 1 || s > M) throw DomainError("symbol " + std::to_string(s) + " outside [1, " + std::to_string(M) + "]");
    std::vector<double> v(static_cast<std::size_t>(M), 0.0);
    v[static_cast<std::size_t>(s - 1)] = 1.0;
    return v;
}

}  // namespace qcae
