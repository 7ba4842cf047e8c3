// Symbol error rate, SNR sweeps of trained models, and a maximum-likelihood QPSK reference.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qcae/autoencoder.hpp"
#include "qcae/channel.hpp"
#include "qcae/error.hpp"

namespace qcae {

inline const std::vector<double> kDefaultLevels = {0, 3, 6, 9, 12, 15, 18};

inline double ser(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.empty()) throw DomainError("SER of an empty batch");
    if (predictions.size() != truth.size()) throw DomainError("prediction and truth batches differ in length");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) errors += predictions[i] != truth[i] ? 1 : 0;
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

struct SweepPoint {
    double ebn0_db = 0.0;
    double ser = 0.0;
    int batches = 10;
    int batch_size = 64;
};

struct SweepResult {
    std::string model;
    std::uint64_t seed = 0;
    SigmaMode sigma_mode = SigmaMode::Paper;
    std::vector<SweepPoint> points;

    double at(double ebn0_db) const {
        for (const auto& p : points) {
            if (p.ebn0_db == ebn0_db) return p.ser;
        }
        throw DomainError("sweep has no level " + std::to_string(ebn0_db) + " dB");
    }
};

struct SweepOptions {
    std::vector<double> levels = kDefaultLevels;
    int batches = 10;
    int batch = 64;
    std::uint64_t seed = 1;
    SigmaMode sigma_mode = SigmaMode::Paper;
};

/// Symbol decisions of a model on one batch; symbols and channel draws come from rng.
template <class Rng>
std::vector<int> decide_batch(const Model& model, std::span<const int> symbols, double sigma, Rng& rng) {
    const auto fwd = model.forward(symbols, sigma, rng);
    std::vector<int> out;
    out.reserve(symbols.size());
    for (const auto& c : fwd.samples) out.push_back(argmax_symbol(c.probs));
    return out;
}

/// SER per level with frozen parameters. Each level draws from its own stream derived from the seed.
inline SweepResult snr_sweep(const Model& model, const SweepOptions& opt) {
    if (opt.batches < 10) throw ConfigError("sweeps use at least 10 batches per level");
    if (opt.batch < 1) throw ConfigError("batch must be >= 1");
    SweepResult r;
    r.model = model.spec().name;
    r.seed = opt.seed;
    r.sigma_mode = opt.sigma_mode;
    for (std::size_t li = 0; li < opt.levels.size(); ++li) {
        const double level = opt.levels[li];
        auto rng = detail::stream(opt.seed, 1000 + li);
        const double sigma = model.sigma(level, opt.sigma_mode);
        std::size_t errors = 0;
        for (int b = 0; b < opt.batches; ++b) {
            const auto sym = detail::draw_symbols(model.M(), opt.batch, rng);
            const auto dec = decide_batch(model, sym, sigma, rng);
            for (std::size_t i = 0; i < sym.size(); ++i) errors += dec[i] != sym[i] ? 1 : 0;
        }
        r.points.push_back({level, static_cast<double>(errors) / (static_cast<double>(opt.batches) * opt.batch),
                            opt.batches, opt.batch});
    }
    return r;
}

inline std::string to_csv(const SweepResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "ebn0_db,ser,batches,batch_size,seed,sigma_mode\n";
    for (const auto& p : r.points) {
        os << p.ebn0_db << ',' << p.ser << ',' << p.batches << ',' << p.batch_size << ',' << r.seed << ','
           << to_string(r.sigma_mode) << '\n';
    }
    return os.str();
}

/// Monte-Carlo SER of unit-power QPSK with minimum-distance decisions over AWGN (rate 2).
inline std::vector<double> qpsk_ml_oracle(std::span<const double> levels, long samples, SigmaMode mode,
                                          std::uint64_t seed = 7) {
    if (samples < 1) throw DomainError("samples must be positive");
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<double> out;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const double sigma = sigma_from_snr(2.0, levels[li], mode);
        auto rng = detail::stream(seed, li);
        std::uniform_int_distribution<int> bit(0, 1);
        std::normal_distribution<double> nrm(0.0, 1.0);
        long errors = 0;
        for (long k = 0; k < samples; ++k) {
            const double xi = bit(rng) ? a : -a;
            const double xq = bit(rng) ? a : -a;
            const double yi = xi + sigma * nrm(rng);
            const double yq = xq + sigma * nrm(rng);
            // Nearest constellation point is the quadrant of y.
            if ((yi >= 0.0) != (xi > 0.0) || (yq >= 0.0) != (xq > 0.0)) ++errors;
        }
        out.push_back(static_cast<double>(errors) / static_cast<double>(samples));
    }
    return out;
}

/// Sum of parameter values; a cheap checksum for before/after comparisons.
inline double param_checksum(const Model& m) {
    double s = 0.0;
    for (double v : m.params()) s += v;
    return s;
}

}  // namespace qcae
