#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dgff/lattice.hpp"
#include "dgff/rng.hpp"

namespace dgff {

/// Numerically stable log sum_i exp(x_i); overflow-free for |x| up to ~1e4.
double log_sum_exp(std::span<const double> x);

/// log Z = log sum_v exp(beta * value_v). Empty regions are rejected.
double log_partition(std::span<const double> values, double beta);

/// Finite-N free energy estimator log Z / log N^2.
double free_energy(std::span<const double> values, double beta, int n);

/// Walker/Vose alias table for O(1) draws from a fixed discrete law.
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& probabilities);
    std::size_t sample(RandomStream& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<uint32_t> alias_;
};

/// Normalized Gibbs weights exp(beta*value)/Z over the members of a region,
/// with an alias table for replica sampling. Immutable after construction.
class GibbsContext {
public:
    GibbsContext(const VertexSet& region, std::vector<double> values,
                 double beta);

    const VertexSet& region() const { return region_; }
    double beta() const { return beta_; }
    double log_z() const { return log_z_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probabilities() const { return probs_; }

    std::size_t sample_member(RandomStream& rng) const {
        return alias_.sample(rng);
    }
    Vertex sample_vertex(RandomStream& rng) const {
        return region_.members()[alias_.sample(rng)];
    }

private:
    VertexSet region_;
    std::vector<double> values_;
    double beta_;
    double log_z_;
    std::vector<double> probs_;
    AliasTable alias_;
};

/// s replicas drawn i.i.d. from one disorder sample's Gibbs measure.
struct ReplicaDraw {
    uint64_t disorder_id = 0;
    std::vector<Vertex> vertices;
};

std::vector<ReplicaDraw> gibbs_sample(const GibbsContext& ctx, int replicas,
                                      int count, uint64_t seed,
                                      uint64_t disorder_id = 0);

/// Exact Gibbs mass of the complement of A_{N,rho} under one disorder sample
/// of the field on the full box.
double boundary_mass(const GibbsContext& full_box_ctx, double rho);

struct HighPoints {
    long count = 0;
    std::optional<double> exponent;  // log(count)/log N^2; absent when 0
    double threshold = 0.0;
};

/// Count of {v in region : value_v >= gamma * sqrt(2/pi) * log N^2}.
HighPoints high_points_count(std::span<const double> values,
                             const VertexSet& region, double gamma, int n);

}  // namespace dgff
