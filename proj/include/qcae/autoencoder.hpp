// End-to-end channel autoencoders: symbol -> TX -> normalize -> channel -> RX -> distribution.
//
// TX is a lookup table, a dense net on one-hot symbols, or a quantum circuit with an
// expectations head. RX is a dense softmax net or a quantum circuit with a
// probabilities head; when the quantum RX has more than M outcomes, the first M
// are the designated symbol outcomes and are renormalized.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qcae/ansatz.hpp"
#include "qcae/channel.hpp"
#include "qcae/classical.hpp"
#include "qcae/circuit.hpp"
#include "qcae/error.hpp"
#include "qcae/json_util.hpp"
#include "qcae/qgrad.hpp"

namespace qcae {

enum class TxKind { Lookup, Dense, Quantum };
enum class RxKind { Dense, Quantum };
enum class GradMethod { Adjoint, ParameterShift };

struct TxSpec {
    TxKind kind = TxKind::Lookup;
    std::vector<int> hidden;  // Dense
    CircuitSpec circuit;      // Quantum
};

struct RxSpec {
    RxKind kind = RxKind::Dense;
    std::vector<int> hidden;
    CircuitSpec circuit;
};

struct ModelSpec {
    std::string name;
    int M = 4;
    int n = 1;
    TxSpec tx;
    RxSpec rx;
    ChannelConfig channel;
};

inline constexpr double kProbFloor = 1e-12;

/// Bits per channel use for M symbols over n uses.
inline double model_rate(int M, int n) { return static_cast<double>(log2_exact(M)) / n; }

inline std::size_t tx_param_count(const ModelSpec& s) {
    switch (s.tx.kind) {
        case TxKind::Lookup: return static_cast<std::size_t>(2 * s.n * s.M);
        case TxKind::Dense:
            return Mlp(static_cast<std::size_t>(s.M), s.tx.hidden, static_cast<std::size_t>(2 * s.n), Activation::Linear)
                .param_count();
        case TxKind::Quantum: return param_count(s.tx.circuit);
    }
    return 0;
}

inline std::size_t rx_param_count(const ModelSpec& s) {
    if (s.rx.kind == RxKind::Dense) {
        return Mlp(static_cast<std::size_t>(2 * s.n), s.rx.hidden, static_cast<std::size_t>(s.M), Activation::Softmax)
            .param_count();
    }
    return param_count(s.rx.circuit);
}

inline void validate(const ModelSpec& s) {
    log2_exact(s.M);
    if (s.n < 1) throw ConfigError("model " + s.name + ": n must be >= 1");
    s.channel.validate();
    if (std::abs(s.channel.rate - model_rate(s.M, s.n)) > 1e-12) {
        throw ConfigError("model " + s.name + ": channel rate must equal log2(M)/n");
    }
    if (s.tx.kind == TxKind::Quantum) {
        const auto& c = s.tx.circuit;
        validate(c);
        if (!is_symbol_encoding(c.encoding.kind)) throw ConfigError("quantum TX needs a symbol encoding");
        if (c.measurement.head != HeadKind::Expectations) throw ConfigError("quantum TX needs an expectations head");
        if (static_cast<int>(circuit_output_dim(c)) != 2 * s.n) {
            throw ConfigError("quantum TX must emit 2n = " + std::to_string(2 * s.n) + " expectation values");
        }
        if (c.M != s.M) throw ConfigError("quantum TX circuit M differs from model M");
    }
    if (s.rx.kind == RxKind::Quantum) {
        const auto& c = s.rx.circuit;
        validate(c);
        if (is_symbol_encoding(c.encoding.kind)) {
            throw ConfigError("quantum RX needs a real-valued feature encoding (symbol encodings are not differentiable)");
        }
        if (c.measurement.head != HeadKind::Probabilities) throw ConfigError("quantum RX needs a probabilities head");
        if (circuit_input_dim(c) != 2 * s.n) {
            throw ConfigError("quantum RX must consume 2n = " + std::to_string(2 * s.n) + " features");
        }
        if (c.M != s.M) throw ConfigError("quantum RX circuit M differs from model M");
    }
}

/// Per-sample intermediates retained for backward.
struct SampleCache {
    int symbol = 1;
    std::vector<double> x;  // normalized TX output
    ChannelDraw draw;
    std::vector<double> y;
    std::vector<std::vector<double>> rx_acts;  // dense RX layer inputs + output
    std::vector<double> rx_features;           // quantum RX circuit features
    std::vector<double> rx_raw;                // quantum RX head outputs (all outcomes)
    std::vector<double> probs;                 // designated distribution over M
};

struct TxCache {
    std::vector<double> raw;  // pre-normalization TX output
    std::vector<std::vector<double>> acts;
};

struct ForwardResult {
    std::vector<SampleCache> samples;
    std::map<int, TxCache> tx;
};

inline double xent_loss(std::span<const double> p, int s) {
    return -std::log(std::max(p[static_cast<std::size_t>(s - 1)], kProbFloor));
}

/// dL/dp of xent_loss; zero when the probability is clamped.
inline std::vector<double> xent_grad(std::span<const double> p, int s) {
    std::vector<double> g(p.size(), 0.0);
    const double ps = p[static_cast<std::size_t>(s - 1)];
    if (ps > kProbFloor) g[static_cast<std::size_t>(s - 1)] = -1.0 / ps;
    return g;
}

inline int argmax_symbol(std::span<const double> p) {
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) + 1;
}

class Model {
public:
    static Model assemble(const ModelSpec& spec) {
        validate(spec);
        Model m;
        m.spec_ = spec;
        m.tx_count_ = qcae::tx_param_count(spec);
        m.rx_count_ = qcae::rx_param_count(spec);
        m.params_.assign(m.tx_count_ + m.rx_count_, 0.0);
        const auto dim = static_cast<std::size_t>(2 * spec.n);
        switch (spec.tx.kind) {
            case TxKind::Lookup: m.lookup_ = LookupEncoder(spec.M, dim); break;
            case TxKind::Dense:
                m.tx_mlp_ = Mlp(static_cast<std::size_t>(spec.M), spec.tx.hidden, dim, Activation::Linear);
                break;
            case TxKind::Quantum:
                for (int s = 1; s <= spec.M; ++s) m.tx_circuits_.push_back(compile(spec.tx.circuit, s));
                break;
        }
        if (spec.rx.kind == RxKind::Dense) {
            m.rx_mlp_ = Mlp(dim, spec.rx.hidden, static_cast<std::size_t>(spec.M), Activation::Softmax);
        } else {
            m.rx_circuit_ = compile(spec.rx.circuit);
        }
        return m;
    }

    const ModelSpec& spec() const { return spec_; }
    int M() const { return spec_.M; }
    int n() const { return spec_.n; }
    std::size_t param_count() const { return params_.size(); }
    std::size_t tx_param_count() const { return tx_count_; }
    std::size_t rx_param_count() const { return rx_count_; }
    std::span<const double> params() const { return params_; }

    void set_params(std::span<const double> p) {
        if (p.size() != params_.size()) {
            throw ConfigError("model " + spec_.name + " expects " + std::to_string(params_.size()) + " parameters, got " +
                              std::to_string(p.size()));
        }
        std::copy(p.begin(), p.end(), params_.begin());
        sync();
    }

    /// Random initialization; redraws while any symbol maps to a zero-energy transmit vector.
    template <class Rng>
    void init(Rng& rng) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            init_once(rng);
            if (transmit_energy_ok()) return;
        }
        throw DegenerateInputError("could not draw a non-degenerate transmitter initialization");
    }

    bool transmit_energy_ok() const {
        for (int s = 1; s <= spec_.M; ++s) {
            const auto x = transmit_raw(s).raw;
            double sq = 0.0;
            for (double v : x) sq += v * v;
            if (!(sq > 1e-12)) return false;
        }
        return true;
    }

private:
    template <class Rng>
    void init_once(Rng& rng) {
        std::vector<double> p(params_.size());
        std::span<double> tx(p.data(), tx_count_);
        std::span<double> rx(p.data() + tx_count_, rx_count_);
        switch (spec_.tx.kind) {
            case TxKind::Lookup: {
                LookupEncoder enc(spec_.M, static_cast<std::size_t>(2 * spec_.n));
                enc.init(rng);
                std::copy(enc.table.begin(), enc.table.end(), tx.begin());
                break;
            }
            case TxKind::Dense: {
                Mlp mlp = tx_mlp_;
                mlp.init(rng);
                mlp.write_params(tx);
                break;
            }
            case TxKind::Quantum: {
                const auto q = init_params(spec_.tx.circuit, rng);
                std::copy(q.begin(), q.end(), tx.begin());
                break;
            }
        }
        if (spec_.rx.kind == RxKind::Dense) {
            Mlp mlp = rx_mlp_;
            mlp.init(rng);
            mlp.write_params(rx);
        } else {
            const auto q = init_params(spec_.rx.circuit, rng);
            std::copy(q.begin(), q.end(), rx.begin());
        }
        set_params(p);
    }

public:
    /// Channel noise standard deviation at a given Eb/N0.
    double sigma(double ebn0_db, SigmaMode mode) const { return sigma_from_snr(spec_.channel.rate, ebn0_db, mode); }
    double train_sigma() const { return sigma(spec_.channel.ebn0_db, spec_.channel.sigma_mode); }

    TxCache transmit_raw(int s) const {
        if (s < 1 || s > spec_.M) {
            throw DomainError("symbol " + std::to_string(s) + " outside [1, " + std::to_string(spec_.M) + "]");
        }
        TxCache c;
        switch (spec_.tx.kind) {
            case TxKind::Lookup: c.raw = lookup_forward(lookup_, s); break;
            case TxKind::Dense:
                c.acts = tx_mlp_.forward_all(one_hot(s, spec_.M));
                c.raw = c.acts.back();
                break;
            case TxKind::Quantum: {
                const double f = s;
                c.raw = run(tx_circuits_[static_cast<std::size_t>(s - 1)], tx_params(), std::span<const double>(&f, 1));
                break;
            }
        }
        return c;
    }

    /// Normalized transmit vector for symbol s.
    std::vector<double> transmit(int s) const { return normalize(transmit_raw(s).raw, spec_.n); }

    /// Fills the RX part of a sample cache from its channel output.
    void receive(SampleCache& c) const {
        if (spec_.rx.kind == RxKind::Dense) {
            c.rx_acts = rx_mlp_.forward_all(c.y);
            c.probs = c.rx_acts.back();
            return;
        }
        c.rx_features = circuit_features(spec_.rx.circuit, c.y);
        c.rx_raw = run(rx_circuit_, rx_params(), c.rx_features);
        c.probs = designated(c.rx_raw);
    }

    /// Designated distribution over M symbols for a channel output y.
    std::vector<double> receive(std::span<const double> y) const {
        SampleCache c;
        c.y.assign(y.begin(), y.end());
        receive(c);
        return c.probs;
    }

    template <class Rng>
    ForwardResult forward(std::span<const int> symbols, double sigma, Rng& rng) const {
        std::vector<ChannelDraw> draws;
        draws.reserve(symbols.size());
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            draws.push_back(draw_channel(spec_.channel.family, static_cast<std::size_t>(2 * spec_.n), sigma, rng));
        }
        return forward_with_draws(symbols, draws);
    }

    ForwardResult forward_with_draws(std::span<const int> symbols, std::span<const ChannelDraw> draws) const {
        if (symbols.size() != draws.size()) throw ConfigError("one channel draw per symbol required");
        ForwardResult r;
        std::map<int, std::vector<double>> normalized;
        for (int s : symbols) {
            if (r.tx.count(s)) continue;
            r.tx[s] = transmit_raw(s);
            normalized[s] = normalize(r.tx[s].raw, spec_.n);
        }
        r.samples.resize(symbols.size());
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            auto& c = r.samples[i];
            c.symbol = symbols[i];
            c.x = normalized[symbols[i]];
            c.draw = draws[i];
            c.y = apply_channel(c.x, c.draw);
            receive(c);
        }
        return r;
    }

    /// Sum over samples of upstream_i . d(probs_i)/d(params).
    std::vector<double> backward(const ForwardResult& fwd, const std::vector<std::vector<double>>& upstream,
                                 GradMethod method = GradMethod::Adjoint) const {
        if (upstream.size() != fwd.samples.size()) throw ConfigError("one upstream gradient per sample required");
        std::vector<double> grad(params_.size(), 0.0);
        std::span<double> gtx(grad.data(), tx_count_);
        std::span<double> grx(grad.data() + tx_count_, rx_count_);
        std::map<int, std::vector<double>> dx_raw;

        for (std::size_t i = 0; i < fwd.samples.size(); ++i) {
            const auto& c = fwd.samples[i];
            const auto& up = upstream[i];
            if (std::all_of(up.begin(), up.end(), [](double v) { return v == 0.0; })) continue;
            std::vector<double> dy;
            if (spec_.rx.kind == RxKind::Dense) {
                dy = rx_mlp_.backward(c.rx_acts, up, grx);
            } else {
                dy = quantum_rx_backward(c, up, grx, method);
            }
            const auto dx = channel_backward(c.draw, dy);
            const auto& raw = fwd.tx.at(c.symbol).raw;
            const auto draw_grad = normalize_backward(raw, dx, spec_.n);
            auto& acc = dx_raw[c.symbol];
            if (acc.empty()) acc.assign(draw_grad.size(), 0.0);
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += draw_grad[k];
        }

        for (const auto& [s, g] : dx_raw) {
            switch (spec_.tx.kind) {
                case TxKind::Lookup: lookup_backward(lookup_, s, g, gtx); break;
                case TxKind::Dense: tx_mlp_.backward(fwd.tx.at(s).acts, g, gtx); break;
                case TxKind::Quantum: {
                    const auto& circ = tx_circuits_[static_cast<std::size_t>(s - 1)];
                    const double f = s;
                    const std::span<const double> feat(&f, 1);
                    if (method == GradMethod::Adjoint) {
                        const auto v = adjoint_vjp(circ, tx_params(), feat, g);
                        for (std::size_t k = 0; k < v.params.size(); ++k) gtx[k] += v.params[k];
                    } else {
                        const auto jac = shift_param_jacobian(circ, tx_params(), feat);
                        const auto v = vector_jacobian(g, jac);
                        for (std::size_t k = 0; k < v.size(); ++k) gtx[k] += v[k];
                    }
                    break;
                }
            }
        }
        return grad;
    }

    std::span<const double> tx_params() const { return {params_.data(), tx_count_}; }
    std::span<const double> rx_params() const { return {params_.data() + tx_count_, rx_count_}; }

private:
    std::vector<double> designated(std::span<const double> raw) const {
        std::vector<double> q(raw.begin(), raw.begin() + spec_.M);
        double z = 0.0;
        for (double v : q) z += v;
        if (z > 0.0) {
            for (auto& v : q) v /= z;
        } else {
            std::fill(q.begin(), q.end(), 1.0 / spec_.M);
        }
        return q;
    }

    std::vector<double> quantum_rx_backward(const SampleCache& c, std::span<const double> up, std::span<double> grx,
                                            GradMethod method) const {
        // Renormalization q_i = P_i / Z over the first M outcomes.
        std::vector<double> dP(c.rx_raw.size(), 0.0);
        double z = 0.0;
        for (int i = 0; i < spec_.M; ++i) z += c.rx_raw[static_cast<std::size_t>(i)];
        if (z > 0.0) {
            double dot = 0.0;
            for (int i = 0; i < spec_.M; ++i) dot += up[static_cast<std::size_t>(i)] * c.probs[static_cast<std::size_t>(i)];
            for (int i = 0; i < spec_.M; ++i) dP[static_cast<std::size_t>(i)] = (up[static_cast<std::size_t>(i)] - dot) / z;
        }
        std::vector<double> dfeat;
        if (method == GradMethod::Adjoint) {
            auto v = adjoint_vjp(rx_circuit_, rx_params(), c.rx_features, dP);
            for (std::size_t k = 0; k < v.params.size(); ++k) grx[k] += v.params[k];
            dfeat = std::move(v.features);
        } else {
            const auto chain = chain_angles(rx_circuit_, angle_jacobian_shift(rx_circuit_, rx_params(), c.rx_features),
                                            rx_params(), c.rx_features);
            const auto vp = vector_jacobian(dP, chain.params);
            for (std::size_t k = 0; k < vp.size(); ++k) grx[k] += vp[k];
            dfeat = vector_jacobian(dP, chain.features);
        }
        if (spec_.rx.circuit.preprocess == Preprocess::Arctan) {
            for (std::size_t k = 0; k < dfeat.size(); ++k) dfeat[k] /= 1.0 + c.y[k] * c.y[k];
        }
        return dfeat;
    }

    void sync() {
        std::span<const double> tx(params_.data(), tx_count_);
        std::span<const double> rx(params_.data() + tx_count_, rx_count_);
        if (spec_.tx.kind == TxKind::Lookup) std::copy(tx.begin(), tx.end(), lookup_.table.begin());
        if (spec_.tx.kind == TxKind::Dense) tx_mlp_.read_params(tx);
        if (spec_.rx.kind == RxKind::Dense) rx_mlp_.read_params(rx);
    }

    ModelSpec spec_;
    std::size_t tx_count_ = 0;
    std::size_t rx_count_ = 0;
    std::vector<double> params_;  // [tx | rx]
    LookupEncoder lookup_;
    Mlp tx_mlp_;
    Mlp rx_mlp_;
    std::vector<CompiledCircuit> tx_circuits_;  // one per symbol
    CompiledCircuit rx_circuit_;
};

inline Model assemble(const ModelSpec& spec) { return Model::assemble(spec); }

/// Mean cross-entropy over a forward result.
inline double batch_loss(const ForwardResult& fwd) {
    double total = 0.0;
    for (const auto& c : fwd.samples) total += xent_loss(c.probs, c.symbol);
    return total / static_cast<double>(fwd.samples.size());
}

/// Upstream gradients of the mean cross-entropy.
inline std::vector<std::vector<double>> batch_loss_upstream(const ForwardResult& fwd) {
    std::vector<std::vector<double>> up;
    up.reserve(fwd.samples.size());
    const double inv = 1.0 / static_cast<double>(fwd.samples.size());
    for (const auto& c : fwd.samples) {
        auto g = xent_grad(c.probs, c.symbol);
        for (auto& v : g) v *= inv;
        up.push_back(std::move(g));
    }
    return up;
}

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t size, double learning_rate) : m(size, 0.0), v(size, 0.0), lr(learning_rate) {}
};

/// Bias-corrected Adam update in place.
inline void adam_step(AdamState& st, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size() || st.m.size() != params.size()) throw ConfigError("Adam shape mismatch");
    ++st.step;
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grads[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grads[i] * grads[i];
        const double mhat = st.m[i] / c1;
        const double vhat = st.v[i] / c2;
        params[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
}

struct TrainOptions {
    long steps = 2000;
    int batch = 64;
    double lr = 0.01;
    double train_ebn0_db = 15.0;
    std::uint64_t seed = 1;
    SigmaMode sigma_mode = SigmaMode::Paper;
    GradMethod grad_method = GradMethod::Adjoint;
    int initial_eval_batches = 10;
};

struct TrainRecord {
    ModelSpec spec;
    TrainOptions options;
    std::vector<double> loss;
    std::vector<double> ser;
    double initial_ser = 0.0;
    double final_train_ser = 0.0;
    std::vector<double> final_params;
    std::string status = "ok";
    long diverged_at = -1;
    double wall_seconds = 0.0;

    bool diverged() const { return status != "ok"; }
};

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

inline double batch_ser(const ForwardResult& fwd) {
    std::size_t errors = 0;
    for (const auto& c : fwd.samples) errors += argmax_symbol(c.probs) != c.symbol ? 1 : 0;
    return static_cast<double>(errors) / static_cast<double>(fwd.samples.size());
}

template <class Rng>
std::vector<int> draw_symbols(int M, int count, Rng& rng) {
    std::uniform_int_distribution<int> dist(1, M);
    std::vector<int> s(static_cast<std::size_t>(count));
    for (auto& v : s) v = dist(rng);
    return s;
}

}  // namespace detail

/// Freshly initialized model for a seed (the same initialization train() uses).
inline Model initialized_model(const ModelSpec& spec, std::uint64_t seed) {
    Model m = Model::assemble(spec);
    auto rng = detail::stream(seed, 1);
    m.init(rng);
    return m;
}

/// Trains with Adam on uniformly drawn symbols and fresh channel draws per step.
inline TrainRecord train(const ModelSpec& spec, const TrainOptions& opt) {
    if (opt.steps < 0) throw ConfigError("steps must be >= 0");
    if (opt.batch < 1) throw ConfigError("batch must be >= 1");
    if (!(opt.lr > 0.0)) throw ConfigError("learning rate must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    TrainRecord rec;
    rec.spec = spec;
    rec.options = opt;
    Model model = initialized_model(spec, opt.seed);
    const double sigma = model.sigma(opt.train_ebn0_db, opt.sigma_mode);

    {
        auto eval_rng = detail::stream(opt.seed, 3);
        double total = 0.0;
        for (int b = 0; b < opt.initial_eval_batches; ++b) {
            const auto sym = detail::draw_symbols(spec.M, opt.batch, eval_rng);
            total += detail::batch_ser(model.forward(sym, sigma, eval_rng));
        }
        rec.initial_ser = opt.initial_eval_batches > 0 ? total / opt.initial_eval_batches : 0.0;
    }

    auto rng = detail::stream(opt.seed, 2);
    AdamState adam(model.param_count(), opt.lr);
    std::vector<double> params(model.params().begin(), model.params().end());
    rec.loss.reserve(static_cast<std::size_t>(opt.steps));
    rec.ser.reserve(static_cast<std::size_t>(opt.steps));
    for (long step = 0; step < opt.steps; ++step) {
        const auto sym = detail::draw_symbols(spec.M, opt.batch, rng);
        ForwardResult fwd;
        double loss = std::numeric_limits<double>::quiet_NaN();
        try {
            fwd = model.forward(sym, sigma, rng);
            loss = batch_loss(fwd);
        } catch (const DegenerateInputError&) {
            // zero-energy transmit vector: treated as divergence below
        }
        if (!std::isfinite(loss)) {
            rec.status = "diverged";
            rec.diverged_at = step;
            break;
        }
        rec.loss.push_back(loss);
        rec.ser.push_back(detail::batch_ser(fwd));
        const auto grad = model.backward(fwd, batch_loss_upstream(fwd), opt.grad_method);
        adam_step(adam, params, grad);
        model.set_params(params);
    }

    const std::size_t tail = std::min<std::size_t>(100, rec.ser.size());
    if (tail == 0) {
        rec.final_train_ser = rec.initial_ser;
    } else {
        double acc = 0.0;
        for (std::size_t i = rec.ser.size() - tail; i < rec.ser.size(); ++i) acc += rec.ser[i];
        rec.final_train_ser = acc / static_cast<double>(tail);
    }
    rec.final_params.assign(model.params().begin(), model.params().end());
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Model carrying the final parameters of a training record.
inline Model restore(const TrainRecord& rec) {
    Model m = Model::assemble(rec.spec);
    m.set_params(rec.final_params);
    return m;
}

// ---- JSON ----

inline json to_json(const ChannelConfig& c) {
    return {{"family", to_string(c.family)}, {"rate", c.rate},   {"ebn0_db", c.ebn0_db},
            {"n", c.n},                      {"seed", c.seed},   {"sigma_mode", to_string(c.sigma_mode)}};
}

inline json to_json(const ModelSpec& s) {
    json tx = {{"kind", s.tx.kind == TxKind::Lookup ? "lookup" : (s.tx.kind == TxKind::Dense ? "dense" : "quantum")}};
    if (s.tx.kind == TxKind::Dense) tx["hidden"] = s.tx.hidden;
    if (s.tx.kind == TxKind::Quantum) tx["circuit"] = to_json(s.tx.circuit);
    json rx = {{"kind", s.rx.kind == RxKind::Dense ? "dense" : "quantum"}};
    if (s.rx.kind == RxKind::Dense) rx["hidden"] = s.rx.hidden;
    if (s.rx.kind == RxKind::Quantum) rx["circuit"] = to_json(s.rx.circuit);
    return {{"name", s.name}, {"M", s.M}, {"n", s.n}, {"tx", tx}, {"rx", rx}, {"channel", to_json(s.channel)}};
}

inline ModelSpec model_from_json(const json& j, const std::string& path) {
    using namespace jsonutil;
    ModelSpec s;
    s.name = get_or<std::string>(j, "name", path, "model");
    s.M = get<int>(j, "M", path);
    s.n = get_or<int>(j, "n", path, 1);
    try {
        log2_exact(s.M);
    } catch (const ConfigError& e) {
        throw ConfigError("field '" + join(path, "M") + "': " + e.what());
    }

    const std::string tp = join(path, "tx");
    const json& tx = require(j, "tx", path);
    const std::string tk = get<std::string>(tx, "kind", tp);
    if (tk == "lookup") {
        s.tx.kind = TxKind::Lookup;
    } else if (tk == "dense") {
        s.tx.kind = TxKind::Dense;
        s.tx.hidden = get_list_or<int>(tx, "hidden", tp, {});
    } else if (tk == "quantum") {
        s.tx.kind = TxKind::Quantum;
        s.tx.circuit = circuit_from_json(require(tx, "circuit", tp), join(tp, "circuit"));
    } else {
        throw ConfigError("field '" + join(tp, "kind") + "': expected \"lookup\", \"dense\" or \"quantum\"");
    }

    const std::string rp = join(path, "rx");
    const json& rx = require(j, "rx", path);
    const std::string rk = get<std::string>(rx, "kind", rp);
    if (rk == "dense") {
        s.rx.kind = RxKind::Dense;
        s.rx.hidden = get_list_or<int>(rx, "hidden", rp, {});
    } else if (rk == "quantum") {
        s.rx.kind = RxKind::Quantum;
        s.rx.circuit = circuit_from_json(require(rx, "circuit", rp), join(rp, "circuit"));
    } else {
        throw ConfigError("field '" + join(rp, "kind") + "': expected \"dense\" or \"quantum\"");
    }

    const std::string cp = join(path, "channel");
    s.channel.n = s.n;
    s.channel.rate = model_rate(s.M, s.n);
    if (j.contains("channel")) {
        const json& c = j.at("channel");
        try {
            s.channel.family = parse_channel_family(get_or<std::string>(c, "family", cp, "awgn"));
            s.channel.sigma_mode = parse_sigma_mode(get_or<std::string>(c, "sigma_mode", cp, "paper"));
        } catch (const ConfigError& e) {
            throw ConfigError("field '" + cp + "': " + e.what());
        }
        s.channel.ebn0_db = get_or<double>(c, "ebn0_db", cp, 15.0);
        s.channel.seed = get_or<std::uint64_t>(c, "seed", cp, 0);
        s.channel.rate = get_or<double>(c, "rate", cp, s.channel.rate);
        s.channel.n = get_or<int>(c, "n", cp, s.n);
        if (s.channel.n != s.n) throw ConfigError("field '" + join(cp, "n") + "': must equal model n");
    }
    try {
        validate(s);
    } catch (const std::exception& e) {
        throw ConfigError("field '" + path + "': " + e.what());
    }
    return s;
}

inline json to_json(const TrainRecord& r) {
    return {{"model", to_json(r.spec)},
            {"steps", r.options.steps},
            {"batch", r.options.batch},
            {"lr", r.options.lr},
            {"train_ebn0_db", r.options.train_ebn0_db},
            {"seed", r.options.seed},
            {"sigma_mode", to_string(r.options.sigma_mode)},
            {"param_count", r.final_params.size()},
            {"status", r.status},
            {"diverged_at", r.diverged_at},
            {"initial_ser", r.initial_ser},
            {"final_train_ser", r.final_train_ser},
            {"loss", r.loss},
            {"ser", r.ser},
            {"final_params", r.final_params}};
}

/// Restores the parts of a record needed to rebuild the trained model.
inline TrainRecord record_from_json(const json& j) {
    using namespace jsonutil;
    TrainRecord r;
    r.spec = model_from_json(require(j, "model", ""), "model");
    r.options.steps = get<long>(j, "steps", "");
    r.options.batch = get<int>(j, "batch", "");
    r.options.lr = get<double>(j, "lr", "");
    r.options.train_ebn0_db = get<double>(j, "train_ebn0_db", "");
    r.options.seed = get<std::uint64_t>(j, "seed", "");
    r.options.sigma_mode = parse_sigma_mode(get<std::string>(j, "sigma_mode", ""));
    r.status = get<std::string>(j, "status", "");
    r.initial_ser = get<double>(j, "initial_ser", "");
    r.final_train_ser = get<double>(j, "final_train_ser", "");
    r.loss = get_list<double>(j, "loss", "");
    r.ser = get_list<double>(j, "ser", "");
    r.final_params = get_list<double>(j, "final_params", "");
    return r;
}

}  // namespace qcae
