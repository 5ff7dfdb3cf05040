#pragma once

#include <cstddef>
#include <vector>

namespace dgff {

/// Minimal dense row-major matrix used by the small-N exact Green solver and
/// the Gaussian-conditioning machinery. Not a general linear-algebra library.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Cholesky factor (lower triangular) of a symmetric positive definite matrix.
/// Throws std::runtime_error if the matrix is not positive definite.
DenseMatrix cholesky_lower(const DenseMatrix& spd);

/// Solve L L^T x = b given the lower Cholesky factor.
std::vector<double> cholesky_solve(const DenseMatrix& lower,
                                   const std::vector<double>& rhs);

/// Full inverse of an SPD matrix via its Cholesky factorization.
DenseMatrix spd_inverse(const DenseMatrix& spd);

}  // namespace dgff
