// Small row-major dense matrix used for Jacobians.
#pragma once

#include <cstddef>
#include <vector>

namespace qcae {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool operator==(const Matrix&) const = default;
};

/// v^T J for a Jacobian J of shape (|v| x cols).
inline std::vector<double> vector_jacobian(const std::vector<double>& v, const Matrix& jac) {
    std::vector<double> out(jac.cols, 0.0);
    for (std::size_t r = 0; r < jac.rows; ++r) {
        for (std::size_t c = 0; c < jac.cols; ++c) out[c] += v[r] * jac(r, c);
    }
    return out;
}

}  // namespace qcae
