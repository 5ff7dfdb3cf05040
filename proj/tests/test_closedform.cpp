#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dgff/closedform.hpp"
#include "dgff/gibbs.hpp"
#include "dgff/rng.hpp"
#include "support/oracles.hpp"

using namespace dgff;

TEST_CASE("free energy of the field: values and continuity") {
    const double bc = beta_critical();
    CHECK(gff_free_energy(0.0).value == 1.0);
    CHECK(gff_free_energy(bc).value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gff_free_energy(bc * (1 + 1e-12)).value ==
          doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gff_free_energy(2.0 * bc).value ==
          doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(gff_free_energy(-0.1), std::invalid_argument);
}

TEST_CASE("rem free energy generalizes the unit-variance case") {
    const double bc = beta_critical();
    for (double beta : {0.0, 0.5, bc, 4.0})
        CHECK(rem_free_energy(beta, 1.0).value ==
              doctest::Approx(gff_free_energy(beta).value).epsilon(1e-14));
    CHECK(rem_free_energy(bc, 4.0).value == doctest::Approx(4.0).epsilon(1e-14));
    // continuity at the sigma-dependent critical point
    for (double sq : {0.25, 1.0, 2.5, 9.0}) {
        const double bcrit = bc / std::sqrt(sq);
        CHECK(rem_free_energy(bcrit, sq).value ==
              doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(rem_free_energy(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("generalized free energy: collapse, split values, ordering") {
    const double bc = beta_critical();
    for (double beta : {0.3, bc, 3.9})
        CHECK(generalized_free_energy(beta, {1.0, 1.0, 0.5}).value ==
              doctest::Approx(gff_free_energy(beta).value).epsilon(1e-14));

    CHECK(generalized_free_energy(bc, {2.0, 1.0, 0.5}).value ==
          doctest::Approx(3.0).epsilon(1e-14));
    CHECK(generalized_free_energy(bc, {1.0, 2.0, 0.5}).value ==
          doctest::Approx(2.0 * std::sqrt(2.5)).epsilon(1e-14));

    // hierarchical correlations can only lower the free energy relative to
    // independent energies at matched total variance
    for (double beta : {0.4, 1.1, 2.0, bc, 3.3, 6.0}) {
        for (auto [s1, s2, alpha] :
             {std::tuple{2.0, 1.0, 0.5}, {1.7, 0.4, 0.3}, {1.01, 1.0, 0.7}}) {
            const SigmaPair sp{s1, s2, alpha};
            const double split = generalized_free_energy(beta, sp).value;
            const double merged = rem_free_energy(beta, sp.v12()).value;
            CHECK(split <= merged + 1e-12);
        }
        // equality on the sigma1 <= sigma2 branch
        const SigmaPair quiet{0.8, 1.3, 0.4};
        CHECK(generalized_free_energy(beta, quiet).value ==
              doctest::Approx(rem_free_energy(beta, quiet.v12()).value)
                  .epsilon(1e-14));
    }
}

TEST_CASE("branch continuity of the free energy in sigma") {
    for (double beta : {0.5, 1.8, 2.6, 5.1}) {
        const double at = generalized_free_energy(beta, {1.0, 1.0, 0.4}).value;
        const double below =
            generalized_free_energy(beta, {1.0 - 1e-9, 1.0, 0.4}).value;
        const double above =
            generalized_free_energy(beta, {1.0 + 1e-9, 1.0, 0.4}).value;
        CHECK(std::abs(below - at) < 1e-7);
        CHECK(std::abs(above - at) < 1e-7);
    }
}

TEST_CASE("overlap limit regimes") {
    const double bc = beta_critical();
    CHECK(overlap_limit(2.0 * bc, 0.5).value == doctest::Approx(0.5));
    CHECK(overlap_limit(2.0 * bc, 1.0).value == 1.0);
    CHECK(overlap_limit(100.0 * bc, 0.3).value ==
          doctest::Approx(0.01).epsilon(1e-12));
    ClosedForm high_t = overlap_limit(0.5 * bc, 0.3);
    CHECK(high_t.value == 1.0);
    CHECK(high_t.branch.find("high-temperature") != std::string::npos);
    CHECK_THROWS_AS(overlap_limit(2.0 * bc, 1.5), std::invalid_argument);
}

TEST_CASE("gamma max values and continuity") {
    CHECK(gamma_max({2.0, 1.0, 0.5}).value == doctest::Approx(1.5));
    CHECK(gamma_max({1.0, 2.0, 0.5}).value ==
          doctest::Approx(std::sqrt(2.5)));
    for (double s : {0.3, 1.0, 2.2})
        CHECK(gamma_max({s, s, 0.3}).value == doctest::Approx(s).epsilon(1e-14));
    const double lo = gamma_max({1.0 - 1e-9, 1.0, 0.6}).value;
    const double hi = gamma_max({1.0 + 1e-9, 1.0, 0.6}).value;
    CHECK(std::abs(lo - hi) < 1e-7);
}

TEST_CASE("high-point exponent: uniform case, continuity, domain") {
    for (double g : {0.0, 0.3, 0.7, 0.95})
        CHECK(highpoint_exponent(g, {1.0, 1.0, 0.5}).value ==
              doctest::Approx(1.0 - g * g).epsilon(1e-14));
    CHECK(highpoint_exponent(0.0, {1.7, 0.6, 0.4}).value == 1.0);

    const SigmaPair sp{2.0, 1.0, 0.5};
    const double gc = sp.v12() / sp.sigma1;
    CHECK(highpoint_exponent(gc, sp).value == doctest::Approx(0.375));
    CHECK(highpoint_exponent(gc - 1e-7, sp).value ==
          doctest::Approx(0.375).epsilon(1e-5));
    CHECK_THROWS_AS(highpoint_exponent(-0.1, sp), std::invalid_argument);
    CHECK_THROWS_AS(highpoint_exponent(1.5, sp), std::invalid_argument);
    CHECK_THROWS_AS(highpoint_exponent(2.0, sp), std::invalid_argument);
}

TEST_CASE("u derivative of the free energy at zero") {
    const double bc = beta_critical();
    ClosedForm right = free_energy_u_derivative(2.0 * bc, 0.5, +1);
    ClosedForm left = free_energy_u_derivative(2.0 * bc, 0.5, -1);
    CHECK(right.value == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(left.value == right.value);
    CHECK(free_energy_u_derivative(2.0 * bc, 0.999, +1).value <
          0.01);  // (1 - alpha) factor
    CHECK_THROWS_AS(free_energy_u_derivative(0.5 * bc, 0.5, +1),
                    std::invalid_argument);

    // matches central finite differences of the generalized free energy,
    // scaled by the pi/beta^2 prefactor the closed form carries
    for (double beta : {1.2 * bc, 2.0 * bc}) {
        for (double alpha : {0.3, 0.5, 0.8}) {
            const double du = 1e-5;
            const double up =
                generalized_free_energy(beta, {1.0, 1.0 + du, alpha}).value;
            const double down =
                generalized_free_energy(beta, {1.0, 1.0 - du, alpha}).value;
            const double fd = (M_PI / (beta * beta)) * (up - down) / (2.0 * du);
            CHECK(fd == doctest::Approx(
                            free_energy_u_derivative(beta, alpha, +1).value)
                            .epsilon(1e-3));
        }
    }

    // away from zero on the positive side the derivative carries the
    // (1+u)/sqrt(alpha + (1-alpha)(1+u)^2) shape
    {
        const double beta = 2.0 * bc, alpha = 0.5, u = 0.3, du = 1e-6;
        const double up =
            generalized_free_energy(beta, {1.0, 1.0 + u + du, alpha}).value;
        const double down =
            generalized_free_energy(beta, {1.0, 1.0 + u - du, alpha}).value;
        const double fd = (M_PI / (beta * beta)) * (up - down) / (2.0 * du);
        const double shape =
            std::sqrt(2.0 * M_PI) / beta * (1.0 - alpha) * (1.0 + u) /
            std::sqrt(alpha + (1.0 - alpha) * (1.0 + u) * (1.0 + u));
        CHECK(fd == doctest::Approx(shape).epsilon(1e-4));
    }
}

TEST_CASE("exponent curve maximum reproduces the free energy") {
    const double bc = beta_critical();
    CurveMax at_zero = exponent_curve_max(0.0, {1.3, 0.9, 0.45});
    CHECK(at_zero.gamma_star == 0.0);
    CHECK(at_zero.value == doctest::Approx(1.0).epsilon(1e-14));

    for (double beta : {0.0, 0.6, 1.4, bc, 2.9, 4.4, 7.0})
        for (double alpha : {0.25, 0.5, 0.75})
            for (auto [s1, s2] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0},
                                  {1.9, 0.3}, {0.4, 1.6}}) {
                const SigmaPair sp{s1, s2, alpha};
                CHECK(exponent_curve_max(beta, sp).value ==
                      doctest::Approx(generalized_free_energy(beta, sp).value)
                          .epsilon(1e-10));
            }

    // subcritical unit case: interior argmax with the quadratic value
    const double beta = 1.1;
    CurveMax cm = exponent_curve_max(beta, {1.0, 1.0, 0.5});
    CHECK(cm.gamma_star ==
          doctest::Approx(std::sqrt(2.0 / M_PI) * beta / 2.0).epsilon(1e-12));
    CHECK(cm.value ==
          doctest::Approx(1.0 + beta * beta / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("two-level reference field: covariance structure") {
    Grem2Spec spec{6, 5, 2.0, 3.0};
    const long reps = 40000;
    double within = 0.0, across = 0.0, variance = 0.0;
    for (long r = 0; r < reps; ++r) {
        std::vector<double> v =
            sample_grem2(spec, derive_seed(1000, r, TaskKind::grem_sample));
        within += v[0] * v[1];           // same block
        across += v[0] * v[spec.k2];     // different blocks
        variance += v[0] * v[0];
    }
    within /= reps;
    across /= reps;
    variance /= reps;
    CHECK(within == doctest::Approx(spec.var1).epsilon(0.05));
    CHECK(std::abs(across) < 0.06);
    CHECK(variance == doctest::Approx(spec.var1 + spec.var2).epsilon(0.05));
}

TEST_CASE("reference-field free energy tracks the closed form as N grows") {
    const SigmaPair sp{1.5, 1.0, 0.5};
    const double beta = 2.0;
    const double closed = generalized_free_energy(beta, sp).value;
    double prev_gap = 1e9;
    for (int n : {32, 128, 512}) {
        Grem2Spec spec = grem2_design(n, sp);
        CHECK(spec.k1 == n);
        CHECK(spec.k2 == n);
        const double est = grem2_free_energy_mc(spec, beta, 32, 1700 + n);
        const double gap = std::abs(est - closed);
        CHECK(gap < prev_gap + 0.02);
        prev_gap = gap;
    }
    CHECK(prev_gap / closed < 0.12);
}

TEST_CASE("grem monotonicity in the level-1 deviation at matched design") {
    const Grem2Spec base{16, 16, 1.0, 1.0};
    const Grem2Spec boosted{16, 16, 1.69, 1.0};
    const int reps = 4000;
    std::vector<double> diffs(reps);
    for (int r = 0; r < reps; ++r) {
        // same seeds: the level-1 variables scale monotonically
        std::vector<double> lo =
            sample_grem2(base, derive_seed(2500, r, TaskKind::grem_sample));
        std::vector<double> hi =
            sample_grem2(boosted, derive_seed(2500, r, TaskKind::grem_sample));
        diffs[r] = log_partition(hi, 1.3) - log_partition(lo, 1.3);
    }
    oracles::MeanStd d = oracles::mean_stderr(diffs);
    CHECK(d.mean > -4.0 * d.stderr_);
}

TEST_CASE("sigma pair validation") {
    CHECK_THROWS_AS(make_sigma_pair(-1.0, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_sigma_pair(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_sigma_pair(1.0, 1.0, 1.0), std::invalid_argument);
    const SigmaPair sp = make_sigma_pair(2.0, 1.0, 0.25);
    CHECK(sp.v12() == doctest::Approx(4.0 * 0.25 + 1.0 * 0.75));
}
