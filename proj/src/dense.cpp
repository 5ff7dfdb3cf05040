#include "dgff/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace dgff {

DenseMatrix cholesky_lower(const DenseMatrix& spd) {
    const std::size_t n = spd.rows();
    if (n != spd.cols())
        throw std::invalid_argument("cholesky_lower: matrix not square");
    DenseMatrix lower(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = spd(i, j);
            const double* li = lower.row(i);
            const double* lj = lower.row(j);
            for (std::size_t k = 0; k < j; ++k) sum -= li[k] * lj[k];
            if (i == j) {
                if (sum <= 0.0)
                    throw std::runtime_error(
                        "cholesky_lower: matrix not positive definite");
                lower(i, i) = std::sqrt(sum);
            } else {
                lower(i, j) = sum / lower(j, j);
            }
        }
    }
    return lower;
}

std::vector<double> cholesky_solve(const DenseMatrix& lower,
                                   const std::vector<double>& rhs) {
    const std::size_t n = lower.rows();
    if (rhs.size() != n)
        throw std::invalid_argument("cholesky_solve: size mismatch");
    std::vector<double> x(rhs);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = x[i];
        const double* li = lower.row(i);
        for (std::size_t k = 0; k < i; ++k) sum -= li[k] * x[k];
        x[i] = sum / li[i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double sum = x[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= lower(k, i) * x[k];
        x[i] = sum / lower(i, i);
    }
    return x;
}

DenseMatrix spd_inverse(const DenseMatrix& spd) {
    const std::size_t n = spd.rows();
    DenseMatrix lower = cholesky_lower(spd);
    DenseMatrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        e[c] = 1.0;
        std::vector<double> col = cholesky_solve(lower, e);
        e[c] = 0.0;
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    // symmetrize against round-off
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) {
            double v = 0.5 * (inv(r, c) + inv(c, r));
            inv(r, c) = v;
            inv(c, r) = v;
        }
    return inv;
}

}  // namespace dgff
