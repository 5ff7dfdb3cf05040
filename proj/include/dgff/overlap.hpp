#pragma once

#include <cstdint>
#include <vector>

#include "dgff/field.hpp"
#include "dgff/gibbs.hpp"
#include "dgff/multiscale.hpp"

namespace dgff {

/// Overlap q(v,w) = G(v,w) * pi / log N^2, via cached Green columns.
double overlap_q(GreenCache& cache, Vertex v, Vertex w);

/// Overlap at scale alpha: residual covariance normalized like q.
double overlap_alpha(GreenCache& cache, double alpha, Vertex v, Vertex w);

struct OverlapValue {
    Vertex v;
    Vertex w;
    double q = 0.0;
};

struct OverlapHistogramConfig {
    int n = 64;
    double beta = 1.0;
    double rho = 0.25;
    int disorder_samples = 16;
    int pairs_per_sample = 2000;
    uint64_t seed = 1;
    int grid_points = 101;
    int workers = 1;
};

/// Monte Carlo estimate of the two-overlap distribution r -> x(r) on a
/// uniform grid over [0,1], averaged over disorder, with between-sample
/// standard errors.
struct OverlapHistogram {
    OverlapHistogramConfig config;
    std::vector<double> grid;
    std::vector<double> x;
    std::vector<double> stderr_;
    double fraction_above_one = 0.0;  // pairs with q > 1 (diagonal at finite N)

    double value_at(double r) const;
};

class ThreadPool;  // experiment.hpp

OverlapHistogram two_overlap_distribution(const OverlapHistogramConfig& config,
                                          ThreadPool* pool = nullptr);

/// Per-pair overlaps for one disorder sample's replica pairs; shared by the
/// histogram estimator and the integral identity.
std::vector<double> sample_pair_overlaps(const FieldSample& sample, double beta,
                                         double rho, int pairs, uint64_t seed,
                                         GreenCache& cache,
                                         ThreadPool* pool = nullptr);

struct BkIntegralResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double difference = 0.0;
};

/// Both sides of the integral identity
///   int_alpha^1 x(r) dr = (1-alpha) - E[ q - alpha ; q >= alpha ]
/// evaluated on one shared empirical pair measure. Overlaps above 1
/// (diagonal pairs at finite N) carry no mass in [alpha, 1] on either side.
BkIntegralResult bk_integral_identity(const std::vector<double>& pair_overlaps,
                                      double alpha);

struct BkDerivativeResult {
    double lhs = 0.0;          // (pi/beta^2) d/du f at u=0, central difference
    double rhs = 0.0;          // exact-summation Gibbs average form
    double difference = 0.0;
    double convexity_gap = 0.0;  // f(+du) + f(-du) - 2 f(0)
};

/// Derivative identity for sigma = (1, 1+u) at u = 0, per disorder sample,
/// with exact summation over A_{N,rho} on both sides.
BkDerivativeResult bk_derivative_identity(const FieldSample& sample,
                                          double beta, double rho, double alpha,
                                          double du = 1e-4);

}  // namespace dgff
