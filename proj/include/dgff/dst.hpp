#pragma once

#include <vector>

namespace dgff {

/// Orthonormal two-dimensional discrete sine transform (DST-I basis) on an
/// n x n grid. The basis functions
///     psi_{jk}(x,y) = (2/(n+1)) sin(pi j x/(n+1)) sin(pi k y/(n+1))
/// diagonalize the Dirichlet walk operator I - Q on V_n, with eigenvalues
///     lambda_{jk} = 1 - (cos(pi j/(n+1)) + cos(pi k/(n+1))) / 2.
/// The transform is involutive: applying it twice returns the input.
class SineBasis2d {
public:
    explicit SineBasis2d(int n);
    ~SineBasis2d();

    SineBasis2d(const SineBasis2d&) = delete;
    SineBasis2d& operator=(const SineBasis2d&) = delete;

    int side() const { return n_; }

    /// In-place orthonormal transform of a row-major n*n grid.
    void transform(std::vector<double>& grid) const;
    void transform(double* grid) const;

    /// Eigenvalue of I - Q for mode (j, k), 1-based.
    double eigenvalue(int j, int k) const {
        return 1.0 - 0.5 * (cos_table_[j - 1] + cos_table_[k - 1]);
    }

    /// sin(pi j x / (n+1)) for 1-based j, x.
    double sine(int j, int x) const;

private:
    int n_;
    void* plan_ = nullptr;  // fftw_plan
    std::vector<double> cos_table_;
    std::vector<double> sin_table_;  // (n+1) x ... flattened j*x products
};

}  // namespace dgff
