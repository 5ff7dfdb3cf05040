#include "dgff/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dgff/pool.hpp"

namespace dgff {

double overlap_q(GreenCache& cache, Vertex v, Vertex w) {
    const int n = cache.geometry().side();
    return cache.green(v, w) * M_PI / (2.0 * std::log(n));
}

double overlap_alpha(GreenCache& cache, double alpha, Vertex v, Vertex w) {
    const int n = cache.geometry().side();
    return residual_covariance(cache, alpha, v, w) * M_PI / (2.0 * std::log(n));
}

double OverlapHistogram::value_at(double r) const {
    if (grid.empty()) throw std::logic_error("OverlapHistogram: empty grid");
    const double pos = r * static_cast<double>(grid.size() - 1);
    std::size_t i = static_cast<std::size_t>(std::lround(pos));
    i = std::min(i, grid.size() - 1);
    return x[i];
}

namespace {

// Greedy cover: pick columns so every pair has one cached endpoint.
std::vector<Vertex> column_cover(const BoxGeometry& geom,
                                 const std::vector<std::pair<int, int>>& pairs) {
    std::unordered_map<int, int> freq;
    for (const auto& [a, b] : pairs) {
        ++freq[a];
        ++freq[b];
    }
    std::vector<std::pair<int, int>> by_freq(freq.begin(), freq.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& l, const auto& r) {
        return l.second != r.second ? l.second > r.second : l.first < r.first;
    });
    std::unordered_set<int> chosen;
    chosen.reserve(by_freq.size());
    std::vector<Vertex> cover;
    for (const auto& [idx, count] : by_freq) {
        (void)count;
        bool needed = false;
        // cheap pass: mark if some pair still uncovered would gain
        for (const auto& [a, b] : pairs) {
            if ((a == idx || b == idx) && !chosen.count(a) && !chosen.count(b)) {
                needed = true;
                break;
            }
        }
        if (needed) {
            chosen.insert(idx);
            cover.push_back(geom.vertex(idx));
        }
    }
    return cover;
}

}  // namespace

std::vector<double> sample_pair_overlaps(const FieldSample& sample, double beta,
                                         double rho, int pairs, uint64_t seed,
                                         GreenCache& cache, ThreadPool* pool) {
    if (pairs < 1)
        throw std::invalid_argument("sample_pair_overlaps: pairs < 1");
    const BoxGeometry& geom = sample.geom;
    VertexSet bulk = bulk_region(geom, rho);
    GibbsContext ctx(bulk, restrict_to_region(sample, bulk), beta);

    RandomStream rng(seed);
    std::vector<std::pair<int, int>> drawn;
    drawn.reserve(pairs);
    for (int p = 0; p < pairs; ++p) {
        Vertex v = ctx.sample_vertex(rng);
        Vertex w = ctx.sample_vertex(rng);
        drawn.emplace_back(geom.index(v), geom.index(w));
    }

    std::vector<Vertex> cover = column_cover(geom, drawn);
    if (pool && pool->workers() > 1) {
        pool->run_indexed(cover.size(),
                          [&](std::size_t i) { cache.column(cover[i]); });
    } else {
        for (const Vertex& v : cover) cache.column(v);
    }

    std::vector<double> overlaps;
    overlaps.reserve(pairs);
    const double norm = M_PI / (2.0 * std::log(geom.side()));
    for (const auto& [a, b] : drawn)
        overlaps.push_back(cache.green(geom.vertex(a), geom.vertex(b)) * norm);
    return overlaps;
}

OverlapHistogram two_overlap_distribution(const OverlapHistogramConfig& config,
                                          ThreadPool* pool) {
    if (config.grid_points < 2)
        throw std::invalid_argument("two_overlap_distribution: tiny grid");
    if (config.disorder_samples < 1)
        throw std::invalid_argument("two_overlap_distribution: no samples");

    const int grid_n = config.grid_points;
    const int d_total = config.disorder_samples;
    const BoxGeometry geom(config.n);
    FieldOps ops(geom);
    GreenCache cache(ops);

    std::vector<std::vector<double>> per_sample(d_total);
    std::vector<double> frac_above(d_total, 0.0);

    auto run_sample = [&](std::size_t d, ThreadPool* inner) {
        const uint64_t fseed =
            derive_seed(config.seed, d, TaskKind::field_sample);
        const uint64_t pseed =
            derive_seed(config.seed, d, TaskKind::replica_pairs);
        FieldSample sample = ops.sample(fseed);
        std::vector<double> overlaps =
            sample_pair_overlaps(sample, config.beta, config.rho,
                                 config.pairs_per_sample, pseed, cache, inner);
        std::vector<long> first_bucket(grid_n + 1, 0);
        long above_one = 0;
        for (double q : overlaps) {
            if (q > 1.0) {
                ++above_one;
                continue;
            }
            long i0 = static_cast<long>(std::ceil(q * (grid_n - 1) - 1e-12));
            i0 = std::clamp<long>(i0, 0, grid_n - 1);
            ++first_bucket[i0];
        }
        std::vector<double> cdf(grid_n, 0.0);
        long running = 0;
        for (int i = 0; i < grid_n; ++i) {
            running += first_bucket[i];
            cdf[i] = static_cast<double>(running) / overlaps.size();
        }
        per_sample[d] = std::move(cdf);
        frac_above[d] =
            static_cast<double>(above_one) / static_cast<double>(overlaps.size());
    };

    if (pool && pool->workers() > 1 && d_total > 1) {
        pool->run_indexed(static_cast<std::size_t>(d_total),
                          [&](std::size_t d) { run_sample(d, nullptr); });
    } else {
        for (int d = 0; d < d_total; ++d)
            run_sample(static_cast<std::size_t>(d), pool);
    }

    OverlapHistogram hist;
    hist.config = config;
    hist.grid.resize(grid_n);
    hist.x.assign(grid_n, 0.0);
    hist.stderr_.assign(grid_n, 0.0);
    for (int i = 0; i < grid_n; ++i)
        hist.grid[i] = static_cast<double>(i) / (grid_n - 1);

    for (int d = 0; d < d_total; ++d) {
        for (int i = 0; i < grid_n; ++i) hist.x[i] += per_sample[d][i];
        hist.fraction_above_one += frac_above[d];
    }
    for (int i = 0; i < grid_n; ++i) hist.x[i] /= d_total;
    hist.fraction_above_one /= d_total;

    if (d_total > 1) {
        for (int i = 0; i < grid_n; ++i) {
            double ss = 0.0;
            for (int d = 0; d < d_total; ++d) {
                const double dev = per_sample[d][i] - hist.x[i];
                ss += dev * dev;
            }
            hist.stderr_[i] = std::sqrt(ss / (d_total - 1)) /
                              std::sqrt(static_cast<double>(d_total));
        }
    }
    return hist;
}

BkIntegralResult bk_integral_identity(const std::vector<double>& pair_overlaps,
                                      double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("bk_integral_identity: alpha outside [0,1]");
    if (pair_overlaps.empty())
        throw std::invalid_argument("bk_integral_identity: no pairs");
    double lhs = 0.0;
    double rhs_term = 0.0;
    for (double q : pair_overlaps) {
        const double capped = std::min(q, 1.0);
        lhs += std::max(0.0, 1.0 - std::max(alpha, q));
        if (q >= alpha) rhs_term += capped - alpha;
    }
    const double count = static_cast<double>(pair_overlaps.size());
    BkIntegralResult out;
    out.lhs = lhs / count;
    out.rhs = (1.0 - alpha) - rhs_term / count;
    out.difference = out.lhs - out.rhs;
    return out;
}

BkDerivativeResult bk_derivative_identity(const FieldSample& sample,
                                          double beta, double rho, double alpha,
                                          double du) {
    if (du <= 0.0)
        throw std::invalid_argument("bk_derivative_identity: du must be > 0");
    if (beta < 0.0)
        throw std::invalid_argument("bk_derivative_identity: beta < 0");
    if (beta == 0.0) return {};  // f is constant in u; both sides vanish

    const BoxGeometry& geom = sample.geom;
    const int n = geom.side();
    VertexSet bulk = bulk_region(geom, rho);
    CoarseField coarse = coarse_field(sample, alpha, bulk);

    const std::size_t count = bulk.size();
    std::vector<double> phi = restrict_to_region(sample, bulk);
    std::vector<double> fine(count);
    for (std::size_t i = 0; i < count; ++i) fine[i] = phi[i] - coarse.values[i];

    const double log_n2 = 2.0 * std::log(n);
    std::vector<double> shifted(count);
    auto f_at = [&](double u) {
        for (std::size_t i = 0; i < count; ++i)
            shifted[i] = phi[i] + u * fine[i];
        return log_partition(shifted, beta) / log_n2;
    };
    const double f_plus = f_at(du);
    const double f_minus = f_at(-du);
    const double f_zero = f_at(0.0);

    BkDerivativeResult out;
    out.lhs = (M_PI / (beta * beta)) * (f_plus - f_minus) / (2.0 * du);
    out.convexity_gap = f_plus + f_minus - 2.0 * f_zero;

    // Exact-summation Gibbs average at u = 0. Direct differentiation gives
    // d/du f = (beta / log N^2) <phi - phi_alpha>_Gibbs, hence the 1/beta.
    const double log_z = log_partition(phi, beta);
    double mean_fine = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        mean_fine += std::exp(beta * phi[i] - log_z) * fine[i];
    out.rhs = (M_PI / (beta * log_n2)) * mean_fine;
    out.difference = out.lhs - out.rhs;
    return out;
}

}  // namespace dgff
