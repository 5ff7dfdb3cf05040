#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dgff/overlap.hpp"
#include "dgff/pool.hpp"
#include "dgff/rng.hpp"
#include "support/oracles.hpp"

using namespace dgff;

TEST_CASE("overlap q on the 2x2 box from the hand solve") {
    BoxGeometry geom(2);
    FieldOps ops(geom);
    GreenCache cache(ops);
    const double q_adjacent = overlap_q(cache, {1, 1}, {2, 1});
    CHECK(q_adjacent ==
          doctest::Approx((1.0 / 3.0) * M_PI / std::log(4.0)).epsilon(1e-12));
    CHECK(overlap_q(cache, {1, 1}, {2, 2}) ==
          doctest::Approx(overlap_q(cache, {2, 2}, {1, 1})).epsilon(1e-12));
}

TEST_CASE("bulk overlaps sit in the log-distance band") {
    const int n = 64;
    BoxGeometry geom(n);
    FieldOps ops(geom);
    GreenCache cache(ops);
    const double log_n2 = 2.0 * std::log(n);
    const Vertex v = geom.center();
    for (int d : {2, 4, 8, 16}) {
        const Vertex w{v.x + d, v.y};
        const double q = overlap_q(cache, v, w);
        const double predicted = 1.0 - std::log(static_cast<double>(d) * d) /
                                           log_n2;
        CHECK(q == doctest::Approx(predicted).epsilon(0.35));
        CHECK(q <= predicted + 0.10);  // upper estimate is tight in the bulk
    }
}

TEST_CASE("overlap at scale alpha: diagonal trend and close-pair band") {
    const double alpha = 0.5;
    double diag[2];
    int i = 0;
    for (int n : {32, 64}) {
        BoxGeometry geom(n);
        FieldOps ops(geom);
        GreenCache cache(ops);
        diag[i++] = overlap_alpha(cache, alpha, geom.center(), geom.center());
    }
    // q_alpha(v,v) -> 1 - alpha with an O(1/log N^2) gap shrinking in N
    CHECK(std::abs(diag[1] - (1.0 - alpha)) <
          std::abs(diag[0] - (1.0 - alpha)));
    CHECK(diag[1] == doctest::Approx(1.0 - alpha).epsilon(0.5));

    BoxGeometry geom(64);
    FieldOps ops(geom);
    GreenCache cache(ops);
    const Vertex v = geom.center();
    for (int d : {2, 3}) {
        const double qa = overlap_alpha(cache, alpha, v, {v.x + d, v.y});
        const double predicted =
            1.0 - alpha - std::log(static_cast<double>(d) * d) /
                              (2.0 * std::log(64.0));
        CHECK(std::abs(qa - predicted) < 0.25);
    }
}

TEST_CASE("two-overlap histogram: uniform pairs against direct Monte Carlo") {
    OverlapHistogramConfig cfg;
    cfg.n = 48;
    cfg.beta = 0.0;  // Gibbs measure is uniform on the bulk
    cfg.rho = 0.25;
    cfg.disorder_samples = 4;
    cfg.pairs_per_sample = 4000;
    cfg.seed = 5;
    OverlapHistogram hist = two_overlap_distribution(cfg);

    // oracle: uniform pairs on the same region, overlaps from fresh columns
    BoxGeometry geom(cfg.n);
    FieldOps ops(geom);
    GreenCache cache(ops);
    VertexSet bulk = bulk_region(geom, cfg.rho);
    RandomStream rng(777);
    const int pairs = 4000;
    long below = 0;
    for (int p = 0; p < pairs; ++p) {
        const Vertex v = bulk.members()[rng.bounded(bulk.size())];
        const Vertex w = bulk.members()[rng.bounded(bulk.size())];
        if (overlap_q(cache, v, w) <= 0.5) ++below;
    }
    const double direct = static_cast<double>(below) / pairs;
    const double se = std::sqrt(direct * (1.0 - direct) / pairs) +
                      hist.stderr_[50] + 1e-3;
    CHECK(std::abs(hist.value_at(0.5) - direct) < 4.0 * se);
}

TEST_CASE("histogram is a CDF and accounts for every pair") {
    OverlapHistogramConfig cfg;
    cfg.n = 32;
    cfg.beta = 2.0;
    cfg.rho = 0.3;
    cfg.disorder_samples = 3;
    cfg.pairs_per_sample = 2000;
    cfg.seed = 6;
    OverlapHistogram hist = two_overlap_distribution(cfg);
    for (std::size_t i = 1; i < hist.x.size(); ++i) {
        CHECK(hist.x[i] >= hist.x[i - 1]);
        CHECK(hist.x[i] >= 0.0);
        CHECK(hist.x[i] <= 1.0);
    }
    CHECK(hist.x.back() + hist.fraction_above_one ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("histogram is independent of the worker count") {
    OverlapHistogramConfig cfg;
    cfg.n = 32;
    cfg.beta = 3.0;
    cfg.rho = 0.3;
    cfg.disorder_samples = 6;
    cfg.pairs_per_sample = 500;
    cfg.seed = 7;
    OverlapHistogram serial = two_overlap_distribution(cfg, nullptr);
    ThreadPool pool(4);
    OverlapHistogram parallel = two_overlap_distribution(cfg, &pool);
    for (std::size_t i = 0; i < serial.x.size(); ++i)
        CHECK(serial.x[i] == parallel.x[i]);
}

TEST_CASE("integral identity is exact on the empirical measure") {
    const int n = 32;
    BoxGeometry geom(n);
    FieldOps ops(geom);
    GreenCache cache(ops);
    for (int d = 0; d < 5; ++d) {
        FieldSample sample =
            ops.sample(derive_seed(31, d, TaskKind::field_sample));
        std::vector<double> overlaps = sample_pair_overlaps(
            sample, 2.0, 0.4, 500,
            derive_seed(31, d, TaskKind::replica_pairs), cache);
        for (double alpha : {0.0, 0.3, 0.5, 0.9}) {
            BkIntegralResult r = bk_integral_identity(overlaps, alpha);
            CHECK(std::abs(r.difference) < 1e-12);
        }
        // alpha = 1: both sides vanish when overlaps never exceed 1 ... the
        // diagonal pairs that do exceed 1 carry no mass either
        BkIntegralResult edge = bk_integral_identity(overlaps, 1.0);
        CHECK(edge.lhs == 0.0);
        CHECK(std::abs(edge.rhs) < 1e-12);
    }
}

TEST_CASE("integral identity at alpha 0 against grid quadrature") {
    const int n = 32;
    BoxGeometry geom(n);
    FieldOps ops(geom);
    GreenCache cache(ops);
    FieldSample sample = ops.sample(derive_seed(32, 0, TaskKind::field_sample));
    std::vector<double> overlaps = sample_pair_overlaps(
        sample, 1.5, 0.4, 2000, derive_seed(32, 0, TaskKind::replica_pairs),
        cache);
    BkIntegralResult r = bk_integral_identity(overlaps, 0.0);

    // quadrature of the empirical CDF on a fine grid
    const int grid = 200000;
    double integral = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double rr = (i + 0.5) / grid;
        long below = 0;
        for (double q : overlaps)
            if (q <= rr) ++below;
        integral += static_cast<double>(below) / overlaps.size() / grid;
    }
    CHECK(std::abs(integral - r.lhs) < 1e-3);
}

TEST_CASE("derivative identity per sample and convexity") {
    const int n = 32;
    BoxGeometry geom(n);
    FieldOps ops(geom);
    for (int d = 0; d < 3; ++d) {
        FieldSample sample =
            ops.sample(derive_seed(33, d, TaskKind::field_sample));
        BkDerivativeResult r =
            bk_derivative_identity(sample, 1.0, 0.4, 0.5, 1e-4);
        CHECK(std::abs(r.difference) < 1e-6);
        CHECK(r.convexity_gap >= -1e-10);

        // the identity carries the 1/beta scaling: check at beta != 1 too
        BkDerivativeResult r2 =
            bk_derivative_identity(sample, 2.5, 0.4, 0.5, 1e-4);
        CHECK(std::abs(r2.difference) < 1e-6);
    }
    // beta = 0: the free energy does not depend on u at all
    FieldSample sample = ops.sample(1);
    BkDerivativeResult zero = bk_derivative_identity(sample, 0.0, 0.4, 0.5);
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK_THROWS_AS(bk_derivative_identity(sample, 1.0, 0.4, 0.5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("restricted and full estimators differ by boundary-mass order") {
    // At fixed N the two estimators differ by at most twice the Gibbs mass
    // outside the bulk, plus sampling noise.
    const int n = 128;
    const double beta = 2.0 * std::sqrt(2.0 * M_PI), rho = 0.25;
    BoxGeometry geom(n);
    FieldOps ops(geom);
    GreenCache cache(ops);
    VertexSet full = inner_box(geom, 0.0);
    VertexSet bulk = bulk_region(geom, rho);
    const double log_n2 = 2.0 * std::log(n);

    const int d_total = 12, pairs = 1500;
    std::vector<double> x_full, x_bulk, masses;
    for (int d = 0; d < d_total; ++d) {
        FieldSample s = ops.sample(derive_seed(81, d, TaskKind::field_sample));
        GibbsContext ctx_full(full, s.values, beta);
        GibbsContext ctx_bulk(bulk, restrict_to_region(s, bulk), beta);
        masses.push_back(boundary_mass(ctx_full, rho));

        RandomStream rng(derive_seed(81, d, TaskKind::replica_pairs));
        long below_full = 0, below_bulk = 0;
        for (int p = 0; p < pairs; ++p) {
            const Vertex a = ctx_full.sample_vertex(rng);
            const Vertex b = ctx_full.sample_vertex(rng);
            if (cache.green(a, b) * M_PI / log_n2 <= 0.5) ++below_full;
            const Vertex c = ctx_bulk.sample_vertex(rng);
            const Vertex e = ctx_bulk.sample_vertex(rng);
            if (cache.green(c, e) * M_PI / log_n2 <= 0.5) ++below_bulk;
        }
        x_full.push_back(static_cast<double>(below_full) / pairs);
        x_bulk.push_back(static_cast<double>(below_bulk) / pairs);
    }
    oracles::MeanStd mf = oracles::mean_stderr(x_full);
    oracles::MeanStd mb = oracles::mean_stderr(x_bulk);
    oracles::MeanStd mm = oracles::mean_stderr(masses);
    const double bound =
        2.0 * mm.mean + 4.0 * (mf.stderr_ + mb.stderr_ + mm.stderr_);
    CHECK(std::abs(mf.mean - mb.mean) <= bound);
}

TEST_CASE("high overlap forces short distance across sizes") {
    // pairs with q >= alpha + eps sit within c * N^(1-alpha-eps) of each
    // other, one constant across sizes
    const double alpha = 0.5, eps = 0.1, beta = 4.0, rho = 0.25;
    const double c_bound = 10.0;
    for (int n : {64, 128}) {
        BoxGeometry geom(n);
        FieldOps ops(geom);
        GreenCache cache(ops);
        VertexSet bulk = bulk_region(geom, rho);
        const double log_n2 = 2.0 * std::log(n);
        FieldSample s = ops.sample(derive_seed(91, n, TaskKind::field_sample));
        GibbsContext ctx(bulk, restrict_to_region(s, bulk), beta);
        RandomStream rng(derive_seed(92, n, TaskKind::replica_pairs));
        const double scale = std::pow(n, 2.0 * (1.0 - alpha - eps));
        for (int p = 0; p < 3000; ++p) {
            const Vertex a = ctx.sample_vertex(rng);
            const Vertex b = ctx.sample_vertex(rng);
            const double q = cache.green(a, b) * M_PI / log_n2;
            if (q >= alpha + eps) {
                const double dx = a.x - b.x, dy = a.y - b.y;
                CHECK(dx * dx + dy * dy <= c_bound * scale);
            }
        }
    }
}
