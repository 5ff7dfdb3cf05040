#include "dgff/multiscale.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dgff {

HarmonicKernel harmonic_kernel(int side) {
    if (side < 1 || (side >= 2 && side % 2 != 0))
        throw std::invalid_argument(
            "harmonic_kernel: side must be 1 or an even integer >= 2");

    HarmonicKernel kernel;
    kernel.side = side;

    if (side == 1) {
        kernel.weights = {{{1, 0}, 0.25}, {{-1, 0}, 0.25},
                          {{0, 1}, 0.25}, {{0, -1}, 0.25}};
        return kernel;
    }

    // Box coordinates {1..s}^2 with the center at (s/2, s/2); ring vertices
    // sit one step outside and each touches exactly one box vertex.
    BoxGeometry box(side);
    FieldOps ops(box);
    const Vertex center{side / 2, side / 2};
    GreenColumn col = ops.green_column(center);

    kernel.weights.reserve(static_cast<std::size_t>(4) * side);
    auto push = [&](Vertex ring, Vertex inside) {
        kernel.weights.push_back(
            {{ring.x - center.x, ring.y - center.y},
             0.25 * col.values[box.index(inside)]});
    };
    for (int y = 1; y <= side; ++y) {
        push({0, y}, {1, y});
        push({side + 1, y}, {side, y});
    }
    for (int x = 1; x <= side; ++x) {
        push({x, 0}, {x, 1});
        push({x, side + 1}, {x, side});
    }
    return kernel;
}

std::shared_ptr<const HarmonicKernel> shared_harmonic_kernel(int side) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const HarmonicKernel>> registry;
    std::scoped_lock lock(mutex);
    auto it = registry.find(side);
    if (it != registry.end()) return it->second;
    auto kernel = std::make_shared<const HarmonicKernel>(harmonic_kernel(side));
    registry.emplace(side, kernel);
    return kernel;
}

namespace {

int kernel_side_for(const BoxGeometry& geom, double alpha) {
    return even_side(std::pow(static_cast<double>(geom.side()), 1.0 - alpha));
}

// The ring of [v]_alpha must stay inside V_N for the kernel sum to be the
// exact conditional expectation.
void check_ring_inside(const BoxGeometry& geom, Vertex v, int side) {
    const int lo = side / 2;       // ring extends to v - s/2
    const int hi = side / 2 + 1;   // and to v + s/2 + 1
    if (v.x - lo < 1 || v.y - lo < 1 || v.x + hi > geom.side() ||
        v.y + hi > geom.side())
        throw std::invalid_argument(
            "coarse_field: clipped neighborhood outside the supported regime");
}

}  // namespace

CoarseField coarse_field(const FieldSample& sample, double alpha,
                         const VertexSet& region) {
    if (alpha <= 0.0 || alpha > 1.0)
        throw std::invalid_argument("coarse_field: alpha must lie in (0, 1]");

    CoarseField out{region, {}, alpha, 1};
    out.values.reserve(region.size());

    if (alpha == 1.0) {  // [v]_1 = v: the field itself
        for (const Vertex& v : region.members())
            out.values.push_back(sample.at(v));
        return out;
    }

    const BoxGeometry& geom = sample.geom;
    const int side = kernel_side_for(geom, alpha);
    out.kernel_side = side;
    auto kernel = shared_harmonic_kernel(side);

    for (const Vertex& v : region.members()) {
        check_ring_inside(geom, v, side);
        double acc = 0.0;
        for (const auto& [off, w] : kernel->weights)
            acc += w * sample.values[geom.index({v.x + off.x, v.y + off.y})];
        out.values.push_back(acc);
    }
    return out;
}

GeneralizedField psi_field(const FieldSample& sample, double alpha,
                           double sigma1, double sigma2, double rho) {
    if (!(rho > 0.0 && rho < alpha && alpha < 1.0))
        throw std::invalid_argument("psi_field: need 0 < rho < alpha < 1");
    if (sigma1 < 0.0 || sigma2 < 0.0)
        throw std::invalid_argument("psi_field: sigmas must be >= 0");

    VertexSet region = bulk_region(sample.geom, rho);
    CoarseField coarse = coarse_field(sample, alpha, region);

    GeneralizedField out{region, {}, std::move(coarse.values), {}, alpha,
                         sigma1, sigma2, rho};
    const std::size_t count = region.size();
    out.fine.resize(count);
    out.psi.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.fine[i] = sample.at(region.members()[i]) - out.coarse[i];
        out.psi[i] = sigma1 * out.coarse[i] + sigma2 * out.fine[i];
    }
    return out;
}

double residual_covariance(GreenCache& cache, double alpha, Vertex v,
                           Vertex w) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument(
            "residual_covariance: alpha must lie in (0, 1)");
    const BoxGeometry& geom = cache.geometry();
    const int side = kernel_side_for(geom, alpha);
    check_ring_inside(geom, v, side);
    check_ring_inside(geom, w, side);
    auto kernel = shared_harmonic_kernel(side);

    auto ring = [&](Vertex c) {
        std::vector<std::pair<Vertex, double>> out;
        out.reserve(kernel->weights.size());
        for (const auto& [off, p] : kernel->weights)
            out.push_back({{c.x + off.x, c.y + off.y}, p});
        return out;
    };
    const auto ring_v = ring(v);
    const auto ring_w = ring(w);

    auto col_v = cache.column(v);
    double total = col_v->at(geom, w);  // G(v, w)
    for (const auto& [u, p] : ring_w) total -= p * col_v->at(geom, u);
    for (const auto& [u, p] : ring_v) {
        auto col_u = cache.column(u);
        double inner = col_u->at(geom, w);
        for (const auto& [uw, pw] : ring_w) inner -= pw * col_u->at(geom, uw);
        total -= p * inner;
    }
    return total;
}

}  // namespace dgff
