#pragma once

#include <cstdint>
#include <vector>

namespace dgff {

struct Vertex {
    int x = 0;
    int y = 0;
    friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// The square box V_N = {1..N}^2 with a row-major linear index.
/// The boundary is the ring of outside vertices sharing an edge with V_N.
class BoxGeometry {
public:
    explicit BoxGeometry(int n);

    int side() const { return n_; }
    int vertex_count() const { return n_ * n_; }

    bool contains(Vertex v) const {
        return v.x >= 1 && v.x <= n_ && v.y >= 1 && v.y <= n_;
    }

    int index(Vertex v) const { return (v.y - 1) * n_ + (v.x - 1); }

    Vertex vertex(int idx) const { return {idx % n_ + 1, idx / n_ + 1}; }

    /// Euclidean distance from v to the nearest boundary vertex. The nearest
    /// boundary vertex is always axis-aligned, so this is an integer value.
    double boundary_distance(Vertex v) const {
        int d = v.x;
        if (v.y < d) d = v.y;
        if (n_ + 1 - v.x < d) d = n_ + 1 - v.x;
        if (n_ + 1 - v.y < d) d = n_ + 1 - v.y;
        return static_cast<double>(d);
    }

    Vertex center() const { return {(n_ + 1) / 2, (n_ + 1) / 2}; }

private:
    int n_;
};

/// A subset of V_N with O(1) membership and deterministic row-major iteration.
class VertexSet {
public:
    VertexSet(const BoxGeometry& geom, std::vector<uint8_t> mask);

    const BoxGeometry& geometry() const { return geom_; }
    bool contains(Vertex v) const {
        return geom_.contains(v) && mask_[geom_.index(v)] != 0;
    }
    const std::vector<Vertex>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

private:
    BoxGeometry geom_;
    std::vector<uint8_t> mask_;
    std::vector<Vertex> members_;
};

/// An axis-aligned square sub-box, possibly clipped by V_N.
struct BoxRegion {
    int x0 = 1;
    int y0 = 1;
    int width = 0;
    int height = 0;
    bool clipped = false;
    int requested_side = 0;

    bool contains(Vertex v) const {
        return v.x >= x0 && v.x < x0 + width && v.y >= y0 && v.y < y0 + height;
    }
    std::vector<Vertex> vertices() const;
};

/// Nearest even integer >= 2 to r; halves round away from zero.
int even_side(double r);

/// V_N^delta: vertices at distance > delta*N from the boundary.
VertexSet inner_box(const BoxGeometry& geom, double delta);

/// A_{N,rho}: vertices at distance >= N^(1-rho) from the boundary.
VertexSet bulk_region(const BoxGeometry& geom, double rho);

/// The neighborhood [v]_t: side even_side(N^(1-t)) centered at v with offsets
/// [-s/2+1, s/2], clipped to V_N. For t = 1 the region is the single vertex.
BoxRegion neighborhood(const BoxGeometry& geom, Vertex v, double t);

/// Disjoint square boxes covering A_{N,rho}, anchored at its lower-left
/// corner, with side a configured fraction of N^(1-alpha).
std::vector<BoxRegion> partition_boxes(const BoxGeometry& geom, double rho,
                                       double alpha, double fraction = 0.25);

}  // namespace dgff
