#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dgff/dense.hpp"
#include "dgff/dst.hpp"
#include "dgff/lattice.hpp"

namespace dgff {

inline constexpr uint32_t kSamplerVersion = 1;

/// One disorder realization of the field on V_N, row-major.
struct FieldSample {
    BoxGeometry geom{1};
    std::vector<double> values;
    uint64_t seed = 0;
    uint32_t sampler_version = kSamplerVersion;

    double at(Vertex v) const { return values[geom.index(v)]; }
};

/// Exact Green-function column G_{V_N}(v, .) for one source vertex.
struct GreenColumn {
    Vertex source;
    std::vector<double> values;

    double at(const BoxGeometry& geom, Vertex u) const {
        return values[geom.index(u)];
    }
};

struct PotentialKernelValue {
    double value = 0.0;
    double kappa = 0.0;
};

/// Default additive constant of the potential kernel, (2*gamma + log 8)/pi.
double default_potential_kappa();

/// Shared spectral plans and Green-function evaluation for one box size.
/// Immutable after construction; safe for concurrent use.
class FieldOps {
public:
    explicit FieldOps(const BoxGeometry& geom);

    const BoxGeometry& geometry() const { return geom_; }
    const SineBasis2d& basis() const { return basis_; }

    /// Exact DGFF sample: i.i.d. modes scaled by lambda^{-1/2}, one inverse
    /// sine transform. O(N^2 log N).
    FieldSample sample(uint64_t seed) const;

    /// Exact column of (I-Q)^{-1}: spectral outer product at the source,
    /// divided by the eigenvalues, one inverse sine transform.
    GreenColumn green_column(Vertex v) const;

    /// All diagonal entries G(v,v), computed separably in O(N^3).
    std::vector<double> green_diagonal() const;

private:
    BoxGeometry geom_;
    SineBasis2d basis_;
    std::vector<double> inv_lambda_;
};

/// Dense (N^2 x N^2) Green matrix (I-Q)^{-1} via Cholesky; the linear-solve
/// oracle for small boxes. Refuses N above the threshold.
DenseMatrix green_exact_small(const BoxGeometry& geom, int max_side = 32);

PotentialKernelValue potential_kernel(Vertex v, Vertex w,
                                      std::optional<double> kappa = {});

/// (v, G(v,v)) for every v in V_N^delta.
std::vector<std::pair<Vertex, double>> variance_profile(const FieldOps& ops,
                                                        double delta);

/// Field values in the iteration order of a sub-region.
std::vector<double> restrict_to_region(const FieldSample& sample,
                                       const VertexSet& region);

/// Bounded LRU cache of Green columns keyed by source vertex.
/// Concurrent readers are safe; inserts are serialized.
class GreenCache {
public:
    explicit GreenCache(const FieldOps& ops, std::size_t capacity = 4096);

    const BoxGeometry& geometry() const { return ops_.geometry(); }

    std::shared_ptr<const GreenColumn> column(Vertex v);
    double green(Vertex v, Vertex u);

    std::size_t size() const;
    std::size_t capacity() const { return capacity_; }
    uint64_t hits() const { return hits_; }
    uint64_t misses() const { return misses_; }

private:
    std::shared_ptr<const GreenColumn> lookup(int idx);
    void insert(int idx, std::shared_ptr<const GreenColumn> col);

    const FieldOps& ops_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<int> order_;  // most recent first
    std::unordered_map<int, std::pair<std::shared_ptr<const GreenColumn>,
                                      std::list<int>::iterator>>
        map_;
    uint64_t hits_ = 0;
    uint64_t misses_ = 0;
};

/// Binary snapshot: magic, version, N, seed as little-endian u64, then N^2
/// little-endian f64 values, row-major.
inline constexpr uint64_t kSnapshotMagic = 0x44474646534E4150ULL;  // "DGFFSNAP"

void write_field_snapshot(const FieldSample& sample, const std::string& path);
FieldSample read_field_snapshot(const std::string& path);

}  // namespace dgff
