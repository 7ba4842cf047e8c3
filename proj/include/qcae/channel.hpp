// Stochastic channel models with frozen draws.
//
// A transmit vector x in R^{2n} holds n complex channel uses as interleaved
// (real, imag) pairs. AWGN: y = x + noise. Rayleigh: y_c = h * x_c + noise_c with
// one complex coefficient h ~ N(0, I_2) per transmission.
#pragma once

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcae/error.hpp"

namespace qcae {

enum class ChannelFamily { Awgn, Rayleigh };

/// Paper: sigma = 1 / (2 R Eb/N0). Textbook: sigma = 1 / sqrt(2 R Eb/N0).
enum class SigmaMode { Paper, Textbook };

inline std::string to_string(ChannelFamily f) { return f == ChannelFamily::Awgn ? "awgn" : "rayleigh"; }
inline std::string to_string(SigmaMode m) { return m == SigmaMode::Paper ? "paper" : "textbook"; }

inline SigmaMode parse_sigma_mode(const std::string& s) {
    if (s == "paper") return SigmaMode::Paper;
    if (s == "textbook") return SigmaMode::Textbook;
    throw ConfigError("sigma_mode must be \"paper\" or \"textbook\", got \"" + s + "\"");
}

inline ChannelFamily parse_channel_family(const std::string& s) {
    if (s == "awgn") return ChannelFamily::Awgn;
    if (s == "rayleigh") return ChannelFamily::Rayleigh;
    throw ConfigError("channel family must be \"awgn\" or \"rayleigh\", got \"" + s + "\"");
}

struct ChannelConfig {
    ChannelFamily family = ChannelFamily::Awgn;
    double rate = 2.0;  // bits per channel use
    double ebn0_db = 15.0;
    int n = 1;
    std::uint64_t seed = 0;
    SigmaMode sigma_mode = SigmaMode::Paper;

    void validate() const {
        if (!(rate > 0.0)) throw ConfigError("channel rate must be positive");
        if (n < 1) throw ConfigError("channel uses n must be >= 1");
    }
};

inline double sigma_from_snr(double rate, double ebn0_db, SigmaMode mode = SigmaMode::Paper) {
    if (!(rate > 0.0)) throw DomainError("rate must be positive");
    const double snr = 2.0 * rate * std::pow(10.0, ebn0_db / 10.0);
    return mode == SigmaMode::Paper ? 1.0 / snr : 1.0 / std::sqrt(snr);
}

struct ChannelDraw {
    std::vector<double> noise;       // R^{2n}
    std::array<double, 2> h{1.0, 0.0};  // (re, im); identity for AWGN

    bool operator==(const ChannelDraw&) const = default;
};

/// Draws h (Rayleigh only, first) then 2n noise components with standard deviation sigma.
template <class Rng>
ChannelDraw draw_channel(ChannelFamily family, std::size_t dim, double sigma, Rng& rng) {
    if (sigma < 0.0) throw DomainError("sigma must be non-negative");
    std::normal_distribution<double> std_normal(0.0, 1.0);
    ChannelDraw d;
    if (family == ChannelFamily::Rayleigh) {
        d.h[0] = std_normal(rng);
        d.h[1] = std_normal(rng);
    }
    d.noise.resize(dim);
    for (auto& v : d.noise) v = sigma * std_normal(rng);
    return d;
}

/// y = h x + noise (h = 1 for AWGN draws).
inline std::vector<double> apply_channel(std::span<const double> x, const ChannelDraw& d) {
    if (x.size() != d.noise.size() || x.size() % 2 != 0) throw DomainError("channel input must have 2n entries");
    std::vector<double> y(x.size());
    const double hr = d.h[0];
    const double hi = d.h[1];
    for (std::size_t c = 0; c < x.size(); c += 2) {
        y[c] = hr * x[c] - hi * x[c + 1] + d.noise[c];
        y[c + 1] = hi * x[c] + hr * x[c + 1] + d.noise[c + 1];
    }
    return y;
}

/// dL/dx = J^T dL/dy for the frozen draw (J is block-diagonal complex multiplication by h).
inline std::vector<double> channel_backward(const ChannelDraw& d, std::span<const double> upstream) {
    std::vector<double> g(upstream.size());
    const double hr = d.h[0];
    const double hi = d.h[1];
    for (std::size_t c = 0; c + 1 < upstream.size(); c += 2) {
        g[c] = hr * upstream[c] + hi * upstream[c + 1];
        g[c + 1] = -hi * upstream[c] + hr * upstream[c + 1];
    }
    return g;
}

template <class Rng>
std::pair<std::vector<double>, ChannelDraw> awgn(std::span<const double> x, double sigma, Rng& rng) {
    auto d = draw_channel(ChannelFamily::Awgn, x.size(), sigma, rng);
    auto y = apply_channel(x, d);
    return {std::move(y), std::move(d)};
}

template <class Rng>
std::pair<std::vector<double>, ChannelDraw> rayleigh(std::span<const double> x, double sigma, Rng& rng) {
    if (x.size() % 2 != 0) throw DomainError("Rayleigh channel input must have an even length");
    auto d = draw_channel(ChannelFamily::Rayleigh, x.size(), sigma, rng);
    auto y = apply_channel(x, d);
    return {std::move(y), std::move(d)};
}

}  // namespace qcae
