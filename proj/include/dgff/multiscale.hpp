#pragma once

#include <memory>
#include <vector>

#include "dgff/field.hpp"
#include "dgff/lattice.hpp"

namespace dgff {

/// Exit distribution of the simple random walk from the convention center of
/// an s x s box, stored as (offset from center, weight) over the boundary
/// ring. Translation invariant: one kernel per side length serves every
/// unclipped neighborhood.
struct HarmonicKernel {
    int side = 0;
    std::vector<std::pair<Vertex, double>> weights;  // Vertex used as offset
};

/// Exact kernel via one interior Green solve: p(u) = G_B(center, w_u)/4 for
/// the unique box vertex w_u adjacent to the ring vertex u. Side 1 is the
/// degenerate single-vertex box (p = 1/4 on each neighbor); even sides >= 2
/// use the [-s/2+1, s/2] center convention. Odd sides >= 3 are rejected.
HarmonicKernel harmonic_kernel(int side);

/// Process-wide kernel registry (kernels are immutable once built).
std::shared_ptr<const HarmonicKernel> shared_harmonic_kernel(int side);

/// Conditional expectations phi_{[v]_alpha} on a region.
struct CoarseField {
    VertexSet region;
    std::vector<double> values;  // indexed like region.members()
    double alpha = 0.0;
    int kernel_side = 0;
};

/// The scale-split field psi = sigma1 * coarse + sigma2 * (phi - coarse)
/// on A_{N,rho}; both components are kept so psi is reconstructible.
struct GeneralizedField {
    VertexSet region;
    std::vector<double> psi;
    std::vector<double> coarse;
    std::vector<double> fine;
    double alpha = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;
};

/// phi_{[v]_alpha} for every v in region via the shared harmonic kernel.
/// Every neighborhood must be unclipped with its boundary ring inside V_N;
/// a clipped neighborhood raises std::invalid_argument.
CoarseField coarse_field(const FieldSample& sample, double alpha,
                         const VertexSet& region);

GeneralizedField psi_field(const FieldSample& sample, double alpha,
                           double sigma1, double sigma2, double rho);

/// Exact E[(phi_v - phi_{[v]_a})(phi_w - phi_{[w]_a})] expanded into Green
/// entries through the kernel weights of both boundary rings.
double residual_covariance(GreenCache& cache, double alpha, Vertex v, Vertex w);

}  // namespace dgff
