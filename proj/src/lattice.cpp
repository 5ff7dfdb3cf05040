#include "dgff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgff {

namespace {

// pow() can land a hair above an exact integer (e.g. 256^0.75); membership
// thresholds nudge downward so exact powers stay inclusive.
double power_threshold(int n, double exponent) {
    double w = std::pow(static_cast<double>(n), exponent);
    return w * (1.0 - 1e-12) - 1e-12;
}

}  // namespace

BoxGeometry::BoxGeometry(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("BoxGeometry: side must be >= 1");
}

VertexSet::VertexSet(const BoxGeometry& geom, std::vector<uint8_t> mask)
    : geom_(geom), mask_(std::move(mask)) {
    if (mask_.size() != static_cast<std::size_t>(geom_.vertex_count()))
        throw std::invalid_argument("VertexSet: mask size mismatch");
    for (int idx = 0; idx < geom_.vertex_count(); ++idx)
        if (mask_[idx]) members_.push_back(geom_.vertex(idx));
}

std::vector<Vertex> BoxRegion::vertices() const {
    std::vector<Vertex> out;
    out.reserve(static_cast<std::size_t>(width) * height);
    for (int y = y0; y < y0 + height; ++y)
        for (int x = x0; x < x0 + width; ++x) out.push_back({x, y});
    return out;
}

int even_side(double r) {
    long half = std::lround(r / 2.0);
    if (half < 1) half = 1;
    return static_cast<int>(2 * half);
}

VertexSet inner_box(const BoxGeometry& geom, double delta) {
    if (delta < 0.0 || delta >= 0.5)
        throw std::invalid_argument("inner_box: delta must lie in [0, 1/2)");
    const double threshold = delta * geom.side();
    std::vector<uint8_t> mask(geom.vertex_count(), 0);
    for (int idx = 0; idx < geom.vertex_count(); ++idx)
        mask[idx] = geom.boundary_distance(geom.vertex(idx)) > threshold;
    return VertexSet(geom, std::move(mask));
}

VertexSet bulk_region(const BoxGeometry& geom, double rho) {
    if (rho <= 0.0 || rho >= 1.0)
        throw std::invalid_argument("bulk_region: rho must lie in (0, 1)");
    const double threshold = power_threshold(geom.side(), 1.0 - rho);
    std::vector<uint8_t> mask(geom.vertex_count(), 0);
    for (int idx = 0; idx < geom.vertex_count(); ++idx)
        mask[idx] = geom.boundary_distance(geom.vertex(idx)) >= threshold;
    return VertexSet(geom, std::move(mask));
}

BoxRegion neighborhood(const BoxGeometry& geom, Vertex v, double t) {
    if (!geom.contains(v))
        throw std::invalid_argument("neighborhood: vertex outside the box");
    if (t <= 0.0 || t > 1.0)
        throw std::invalid_argument("neighborhood: t must lie in (0, 1]");
    if (t == 1.0) return BoxRegion{v.x, v.y, 1, 1, false, 1};

    const int n = geom.side();
    const int s = even_side(std::pow(static_cast<double>(n), 1.0 - t));
    const int lo_x = v.x - s / 2 + 1;
    const int lo_y = v.y - s / 2 + 1;
    const int hi_x = v.x + s / 2;
    const int hi_y = v.y + s / 2;

    BoxRegion region;
    region.x0 = std::max(lo_x, 1);
    region.y0 = std::max(lo_y, 1);
    region.width = std::min(hi_x, n) - region.x0 + 1;
    region.height = std::min(hi_y, n) - region.y0 + 1;
    region.clipped = (lo_x < 1 || lo_y < 1 || hi_x > n || hi_y > n);
    region.requested_side = s;
    return region;
}

std::vector<BoxRegion> partition_boxes(const BoxGeometry& geom, double rho,
                                       double alpha, double fraction) {
    if (!(rho > 0.0 && rho < alpha && alpha < 1.0))
        throw std::invalid_argument(
            "partition_boxes: need 0 < rho < alpha < 1");
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("partition_boxes: bad box fraction");

    const int n = geom.side();
    const double bulk_threshold = power_threshold(n, 1.0 - rho);
    int lo = 1;
    while (lo <= n && static_cast<double>(lo) < bulk_threshold) ++lo;
    const int hi = n + 1 - lo;
    if (lo > hi)
        throw std::invalid_argument("partition_boxes: A_{N,rho} is empty");

    int side = static_cast<int>(
        std::lround(fraction * std::pow(static_cast<double>(n), 1.0 - alpha)));
    if (side < 1) side = 1;

    std::vector<BoxRegion> boxes;
    for (int y = lo; y <= hi; y += side) {
        for (int x = lo; x <= hi; x += side) {
            BoxRegion b;
            b.x0 = x;
            b.y0 = y;
            b.width = std::min(side, hi - x + 1);
            b.height = std::min(side, hi - y + 1);
            b.clipped = (b.width != side || b.height != side);
            b.requested_side = side;
            boxes.push_back(b);
        }
    }
    return boxes;
}

}  // namespace dgff
