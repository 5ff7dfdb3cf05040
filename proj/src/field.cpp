#include "dgff/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dgff/rng.hpp"

namespace dgff {

double default_potential_kappa() {
    const double euler_gamma = 0.57721566490153286060651209;
    return (2.0 * euler_gamma + std::log(8.0)) / M_PI;
}

FieldOps::FieldOps(const BoxGeometry& geom) : geom_(geom), basis_(geom.side()) {
    const int n = geom_.side();
    inv_lambda_.resize(static_cast<std::size_t>(n) * n);
    for (int k = 1; k <= n; ++k)
        for (int j = 1; j <= n; ++j)
            inv_lambda_[static_cast<std::size_t>(k - 1) * n + (j - 1)] =
                1.0 / basis_.eigenvalue(j, k);
}

FieldSample FieldOps::sample(uint64_t seed) const {
    const int n = geom_.side();
    FieldSample out;
    out.geom = geom_;
    out.seed = seed;
    out.values.resize(static_cast<std::size_t>(n) * n);

    RandomStream rng(seed);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = rng.gaussian() * std::sqrt(inv_lambda_[i]);
    basis_.transform(out.values);
    return out;
}

GreenColumn FieldOps::green_column(Vertex v) const {
    if (!geom_.contains(v))
        throw std::invalid_argument("green_column: vertex outside the box");
    const int n = geom_.side();
    GreenColumn col;
    col.source = v;
    col.values.resize(static_cast<std::size_t>(n) * n);

    // Forward transform of a unit source is the outer product of two sine
    // rows; only the backward transform costs O(N^2 log N).
    const double norm = 2.0 / (n + 1.0);
    for (int k = 1; k <= n; ++k) {
        const double sy = basis_.sine(k, v.y);
        double* row = col.values.data() + static_cast<std::size_t>(k - 1) * n;
        const double* il = inv_lambda_.data() + static_cast<std::size_t>(k - 1) * n;
        for (int j = 1; j <= n; ++j)
            row[j - 1] = norm * basis_.sine(j, v.x) * sy * il[j - 1];
    }
    basis_.transform(col.values);
    return col;
}

std::vector<double> FieldOps::green_diagonal() const {
    const int n = geom_.side();
    // G(v,v) = (2/(n+1))^2 sum_j sin^2(t j x) * [sum_k sin^2(t k y)/lambda_jk]
    std::vector<double> inner(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 1; j <= n; ++j) {
        double* row = inner.data() + static_cast<std::size_t>(j - 1) * n;
        const double* il = inv_lambda_.data();
        for (int y = 1; y <= n; ++y) {
            double acc = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double s = basis_.sine(k, y);
                acc += s * s * il[static_cast<std::size_t>(k - 1) * n + (j - 1)];
            }
            row[y - 1] = acc;
        }
    }
    std::vector<double> diag(static_cast<std::size_t>(n) * n, 0.0);
    const double norm2 = 4.0 / ((n + 1.0) * (n + 1.0));
    for (int y = 1; y <= n; ++y) {
        for (int x = 1; x <= n; ++x) {
            double acc = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double s = basis_.sine(j, x);
                acc += s * s * inner[static_cast<std::size_t>(j - 1) * n + (y - 1)];
            }
            diag[static_cast<std::size_t>(y - 1) * n + (x - 1)] = norm2 * acc;
        }
    }
    return diag;
}

DenseMatrix green_exact_small(const BoxGeometry& geom, int max_side) {
    const int n = geom.side();
    if (n > max_side)
        throw std::runtime_error(
            "green_exact_small: side exceeds the dense threshold");
    const int total = n * n;
    DenseMatrix op(total, total);  // I - Q
    for (int idx = 0; idx < total; ++idx) {
        Vertex v = geom.vertex(idx);
        op(idx, idx) = 1.0;
        const Vertex nbrs[4] = {{v.x + 1, v.y}, {v.x - 1, v.y},
                                {v.x, v.y + 1}, {v.x, v.y - 1}};
        for (const Vertex& u : nbrs)
            if (geom.contains(u)) op(idx, geom.index(u)) = -0.25;
    }
    return spd_inverse(op);
}

PotentialKernelValue potential_kernel(Vertex v, Vertex w,
                                      std::optional<double> kappa) {
    PotentialKernelValue out;
    out.kappa = kappa.value_or(default_potential_kappa());
    if (v == w) {
        out.value = 0.0;
        return out;
    }
    const double dx = v.x - w.x;
    const double dy = v.y - w.y;
    out.value = (2.0 / M_PI) * 0.5 * std::log(dx * dx + dy * dy) + out.kappa;
    return out;
}

std::vector<std::pair<Vertex, double>> variance_profile(const FieldOps& ops,
                                                        double delta) {
    VertexSet region = inner_box(ops.geometry(), delta);
    std::vector<double> diag = ops.green_diagonal();
    std::vector<std::pair<Vertex, double>> out;
    out.reserve(region.size());
    for (const Vertex& v : region.members())
        out.emplace_back(v, diag[ops.geometry().index(v)]);
    return out;
}

std::vector<double> restrict_to_region(const FieldSample& sample,
                                       const VertexSet& region) {
    std::vector<double> out;
    out.reserve(region.size());
    for (const Vertex& v : region.members()) out.push_back(sample.at(v));
    return out;
}

GreenCache::GreenCache(const FieldOps& ops, std::size_t capacity)
    : ops_(ops), capacity_(capacity == 0 ? 1 : capacity) {}

std::shared_ptr<const GreenColumn> GreenCache::lookup(int idx) {
    std::scoped_lock lock(mutex_);
    auto it = map_.find(idx);
    if (it == map_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second.second);
    ++hits_;
    return it->second.first;
}

void GreenCache::insert(int idx, std::shared_ptr<const GreenColumn> col) {
    std::scoped_lock lock(mutex_);
    if (map_.count(idx)) return;  // lost a race; keep the existing column
    order_.push_front(idx);
    map_.emplace(idx, std::make_pair(std::move(col), order_.begin()));
    while (map_.size() > capacity_) {
        int victim = order_.back();
        order_.pop_back();
        map_.erase(victim);
    }
}

std::shared_ptr<const GreenColumn> GreenCache::column(Vertex v) {
    const int idx = ops_.geometry().index(v);
    if (auto hit = lookup(idx)) return hit;
    auto col = std::make_shared<const GreenColumn>(ops_.green_column(v));
    {
        std::scoped_lock lock(mutex_);
        ++misses_;
    }
    insert(idx, col);
    return col;
}

double GreenCache::green(Vertex v, Vertex u) {
    // Either endpoint's column serves the pair; prefer whichever is cached.
    const int iv = ops_.geometry().index(v);
    const int iu = ops_.geometry().index(u);
    if (auto hit = lookup(iv)) return hit->values[iu];
    if (auto hit = lookup(iu)) return hit->values[iv];
    return column(v)->values[iu];
}

std::size_t GreenCache::size() const {
    std::scoped_lock lock(mutex_);
    return map_.size();
}

namespace {

void put_u64(std::string& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

uint64_t get_u64(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void write_field_snapshot(const FieldSample& sample, const std::string& path) {
    std::string buf;
    buf.reserve(32 + sample.values.size() * 8);
    put_u64(buf, kSnapshotMagic);
    put_u64(buf, sample.sampler_version);
    put_u64(buf, static_cast<uint64_t>(sample.geom.side()));
    put_u64(buf, sample.seed);
    for (double x : sample.values) {
        uint64_t bits;
        std::memcpy(&bits, &x, 8);
        put_u64(buf, bits);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("snapshot: short write to " + path);
}

FieldSample read_field_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (buf.size() < 32) throw std::runtime_error("snapshot: truncated header");
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data());
    if (get_u64(p) != kSnapshotMagic)
        throw std::runtime_error("snapshot: bad magic");
    FieldSample sample;
    sample.sampler_version = static_cast<uint32_t>(get_u64(p + 8));
    const uint64_t n = get_u64(p + 16);
    sample.seed = get_u64(p + 24);
    sample.geom = BoxGeometry(static_cast<int>(n));
    const std::size_t count = static_cast<std::size_t>(n) * n;
    if (buf.size() != 32 + count * 8)
        throw std::runtime_error("snapshot: size mismatch");
    sample.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        uint64_t bits = get_u64(p + 32 + 8 * i);
        std::memcpy(&sample.values[i], &bits, 8);
    }
    return sample;
}

}  // namespace dgff
