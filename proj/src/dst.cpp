#include "dgff/dst.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace dgff {

namespace {
// The FFTW planner is not thread-safe; new-array execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

SineBasis2d::SineBasis2d(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("SineBasis2d: side must be >= 1");

    cos_table_.resize(n);
    for (int j = 1; j <= n; ++j)
        cos_table_[j - 1] = std::cos(M_PI * j / (n + 1.0));

    // sin(pi m/(n+1)) over one full period of m; sine(j,x) reduces j*x mod 2(n+1).
    sin_table_.resize(2 * (n + 1));
    for (int m = 0; m < 2 * (n + 1); ++m)
        sin_table_[m] = std::sin(M_PI * m / (n + 1.0));

    std::scoped_lock lock(planner_mutex());
    double* buf = fftw_alloc_real(static_cast<std::size_t>(n) * n);
    plan_ = fftw_plan_r2r_2d(n, n, buf, buf, FFTW_RODFT00, FFTW_RODFT00,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!plan_) throw std::runtime_error("SineBasis2d: FFTW planning failed");
}

SineBasis2d::~SineBasis2d() {
    if (plan_) {
        std::scoped_lock lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

double SineBasis2d::sine(int j, int x) const {
    long long m = static_cast<long long>(j) * x % (2LL * (n_ + 1));
    return sin_table_[static_cast<std::size_t>(m)];
}

void SineBasis2d::transform(double* grid) const {
    // RODFT00 computes 2 * sum_x f(x) sin(pi j x/(n+1)) per dimension; the
    // orthonormal transform rescales by 1/(2(n+1)).
    fftw_execute_r2r(static_cast<fftw_plan>(plan_), grid, grid);
    const double scale = 1.0 / (2.0 * (n_ + 1));
    const std::size_t total = static_cast<std::size_t>(n_) * n_;
    for (std::size_t i = 0; i < total; ++i) grid[i] *= scale;
}

void SineBasis2d::transform(std::vector<double>& grid) const {
    if (grid.size() != static_cast<std::size_t>(n_) * n_)
        throw std::invalid_argument("SineBasis2d: grid size mismatch");
    transform(grid.data());
}

}  // namespace dgff
