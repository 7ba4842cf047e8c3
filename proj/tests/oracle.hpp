// Independent reference implementations used as test oracles.
//
// The dense simulator builds full 2^k x 2^k operators by Kronecker products of
// gate matrices written out from their definitions; it shares no code with the
// library's in-place kernels.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Dense = std::vector<std::vector<cplx>>;

inline Dense identity(std::size_t d) {
    Dense m(d, std::vector<cplx>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1.0;
    return m;
}

inline Dense kron(const Dense& a, const Dense& b) {
    const std::size_t ra = a.size(), rb = b.size();
    Dense m(ra * rb, std::vector<cplx>(ra * rb, 0.0));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ra; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < rb; ++l) m[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
    return m;
}

inline Dense mul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense m(n, std::vector<cplx>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) m[i][j] += a[i][k] * b[k][j];
        }
    return m;
}

inline std::vector<cplx> apply(const Dense& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

const cplx I{0.0, 1.0};

inline Dense pauli_x() { return {{0, 1}, {1, 0}}; }
inline Dense pauli_y() { return {{0, -I}, {I, 0}}; }
inline Dense pauli_z() { return {{1, 0}, {0, -1}}; }

/// exp(-i t/2 P) = cos(t/2) I - i sin(t/2) P
inline Dense rot(const Dense& p, double t) {
    Dense m = identity(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = (i == j ? std::cos(t / 2) : 0.0) - I * std::sin(t / 2) * p[i][j];
    return m;
}

/// Embeds a single-qubit operator on qubit q of k (qubit 0 leftmost factor).
inline Dense on_qubit(const Dense& u, int q, int k) {
    Dense m = {{1.0}};
    for (int i = 0; i < k; ++i) m = kron(m, i == q ? u : identity(2));
    return m;
}

/// |0><0| (x) I + |1><1| (x) X on (control, target).
inline Dense cnot(int c, int t, int k) {
    Dense p0 = {{1, 0}, {0, 0}};
    Dense p1 = {{0, 0}, {0, 1}};
    Dense a = {{1.0}}, b = {{1.0}};
    for (int i = 0; i < k; ++i) {
        a = kron(a, i == c ? p0 : identity(2));
        b = kron(b, i == c ? p1 : (i == t ? pauli_x() : identity(2)));
    }
    Dense m = a;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[i][j] += b[i][j];
    return m;
}

/// exp(-i t/2 Z_a Z_b), diagonal.
inline Dense zz(int a, int b, double t, int k) {
    const Dense zzop = mul(on_qubit(pauli_z(), a, k), on_qubit(pauli_z(), b, k));
    Dense m = identity(zzop.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i][i] = std::exp(-I * (t / 2) * zzop[i][i]);
    return m;
}

inline std::vector<cplx> zero_state(int k) {
    std::vector<cplx> v(std::size_t{1} << k, 0.0);
    v[0] = 1.0;
    return v;
}

inline double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (auto a : v) s += std::norm(a);
    return s;
}

/// <v|O|v> for a dense observable.
inline cplx expect(const Dense& o, const std::vector<cplx>& v) {
    const auto ov = apply(o, v);
    cplx s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * ov[i];
    return s;
}

/// Central differences, written independently of the library helper.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                        double h) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = f(x);
        x[i] = x0 - h;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2 * h);
    }
    return g;
}

inline std::vector<double> uniform_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

/// Upper critical values of the chi-square distribution at alpha = 0.001 (scipy.stats.chi2.ppf(0.999, df)).
inline double chi2_crit_999(int df) {
    switch (df) {
        case 1: return 10.828;
        case 3: return 16.266;
        case 7: return 24.322;
        case 15: return 37.697;
    }
    return 0.0;
}

}  // namespace oracle
