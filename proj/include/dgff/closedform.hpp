#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dgff {

/// Critical inverse temperature sqrt(2*pi) of the unit-variance normalization.
double beta_critical();

/// Scale-split variance parameters; V12 = sigma1^2*alpha + sigma2^2*(1-alpha).
struct SigmaPair {
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double alpha = 0.5;

    double v12() const {
        return sigma1 * sigma1 * alpha + sigma2 * sigma2 * (1.0 - alpha);
    }
};

SigmaPair make_sigma_pair(double sigma1, double sigma2, double alpha);

struct ClosedForm {
    double value = 0.0;
    std::string branch;
};

/// Free energy of the field on V_N: 1 + beta^2/(2 pi) up to beta_c, linear after.
ClosedForm gff_free_energy(double beta);

/// REM free energy for N^2 i.i.d. Gaussians of variance (sigma^2/pi) log N^2.
ClosedForm rem_free_energy(double beta, double sigma_sq);

/// Free energy of the scale-split field: f(beta; V12) when sigma1 <= sigma2,
/// the two-level split alpha*f(beta;s1^2) + (1-alpha)*f(beta;s2^2) otherwise.
ClosedForm generalized_free_energy(double beta, const SigmaPair& sp);

/// Limiting two-overlap distribution value at r. Below beta_c all mass sits
/// at overlap zero, so the distribution function is identically 1.
ClosedForm overlap_limit(double beta, double r);

/// Largest gamma with a nonvanishing high-point set.
ClosedForm gamma_max(const SigmaPair& sp);

/// Log-count exponent of gamma-high points of the scale-split field.
ClosedForm highpoint_exponent(double gamma, const SigmaPair& sp);

/// One-sided u-derivative of the free energy for sigma = (1, 1+u) at u = 0;
/// both sides equal (sqrt(2 pi)/beta) (1 - alpha).
ClosedForm free_energy_u_derivative(double beta, double alpha, int side);

struct CurveMax {
    double gamma_star = 0.0;
    double value = 0.0;
};

/// Maximize P_beta(gamma) = exponent(gamma) + sqrt(2/pi)*beta*gamma over
/// [0, gamma_max] by closed-form stationary points; the maximum equals the
/// generalized free energy.
CurveMax exponent_curve_max(double beta, const SigmaPair& sp);

/// Two-level hierarchical reference field: k1 blocks, k2 leaves per block.
struct Grem2Spec {
    long k1 = 1;
    long k2 = 1;
    double var1 = 1.0;
    double var2 = 1.0;
};

/// One disorder sample: value[b*k2 + l] = g1[b] + g2[b*k2 + l].
std::vector<double> sample_grem2(const Grem2Spec& spec, uint64_t seed);

/// The N-scaled design matching the scale-split field: N^(2 alpha) blocks,
/// N^(2(1-alpha)) leaves per block, level variances (s^2 scale / pi) log N^2.
Grem2Spec grem2_design(int n, const SigmaPair& sp);

/// Monte Carlo free energy log Z / log(k1 k2) averaged over repetitions.
double grem2_free_energy_mc(const Grem2Spec& spec, double beta, int reps,
                            uint64_t seed);

}  // namespace dgff
