#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dgff/overlap.hpp"

namespace dgff {

/// One truncated Poisson-Dirichlet weight sequence, decreasing. Weights are
/// normalized by the retained sum plus the expected tail mass beyond the
/// K-th atom, so sum(weights) < 1 with a deficit shrinking in K.
struct PDWeights {
    double alpha = 0.5;
    int atoms = 0;
    std::vector<double> weights;
    double retained_sum = 0.0;   // sum of the normalized weights
    double tail_estimate = 0.0;  // estimated unnormalized mass beyond atom K
};

/// Arrival-time construction: eta_i = Gamma_i^(-1/alpha) for unit-rate
/// Poisson arrival times Gamma_i, already decreasing.
PDWeights sample_pd(double alpha, int atoms, uint64_t seed);

/// F evaluated on the replica-equality pattern: block_id[l] is the index of
/// the first replica equal to replica l (canonical first-occurrence labels).
using PatternFunction = std::function<double(const std::vector<int>&)>;

struct PdMoment {
    double value = 0.0;
    double stderr_ = 0.0;
    long samples = 0;
};

/// E[ sum_{k_1..k_s} xi_{k_1}...xi_{k_s} F(pattern) ] over PD samples.
/// For s <= 4 the inner sum is evaluated exactly over set partitions from
/// power sums of the weights; larger s falls back to index sampling.
PdMoment pd_replica_moment(double alpha, int s, const PatternFunction& f,
                           long samples, int atoms, uint64_t seed,
                           long index_draws_per_sample = 64);

/// Side-by-side report of the field overlap histogram against the
/// Poisson-Dirichlet predictions at alpha = beta_c / beta.
struct PdFieldComparison {
    double beta = 0.0;
    double alpha = 0.0;            // beta_c / beta
    double r_interior = 0.5;
    double x_interior = 0.0;       // field estimate at r_interior
    double x_stderr = 0.0;
    double interior_target = 0.0;  // beta_c / beta
    double interior_gap = 0.0;
    double pd_coincidence = 0.0;   // E sum xi^2 at the matching alpha
    double pd_stderr = 0.0;
    double consistency_gap = 0.0;  // |(1 - x_interior) - pd_coincidence|
};

PdFieldComparison pd_vs_field_overlap(double beta, const OverlapHistogram& hist,
                                      long pd_samples = 20000,
                                      int pd_atoms = 2000, uint64_t seed = 1,
                                      double r_interior = 0.5);

}  // namespace dgff
