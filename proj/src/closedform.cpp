#include "dgff/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dgff/gibbs.hpp"
#include "dgff/rng.hpp"

namespace dgff {

double beta_critical() { return std::sqrt(2.0 * M_PI); }

SigmaPair make_sigma_pair(double sigma1, double sigma2, double alpha) {
    if (sigma1 < 0.0 || sigma2 < 0.0)
        throw std::invalid_argument("SigmaPair: sigmas must be >= 0");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("SigmaPair: alpha must lie in (0, 1)");
    return {sigma1, sigma2, alpha};
}

ClosedForm gff_free_energy(double beta) {
    if (beta < 0.0) throw std::invalid_argument("gff_free_energy: beta < 0");
    const double bc = beta_critical();
    if (beta <= bc)
        return {1.0 + beta * beta / (2.0 * M_PI), "subcritical"};
    return {std::sqrt(2.0 / M_PI) * beta, "supercritical"};
}

ClosedForm rem_free_energy(double beta, double sigma_sq) {
    if (beta < 0.0) throw std::invalid_argument("rem_free_energy: beta < 0");
    if (sigma_sq <= 0.0)
        throw std::invalid_argument("rem_free_energy: sigma^2 must be > 0");
    const double bc = beta_critical() / std::sqrt(sigma_sq);
    if (beta <= bc)
        return {1.0 + beta * beta * sigma_sq / (2.0 * M_PI), "subcritical"};
    return {std::sqrt(2.0 / M_PI) * std::sqrt(sigma_sq) * beta,
            "supercritical"};
}

ClosedForm generalized_free_energy(double beta, const SigmaPair& sp) {
    if (sp.sigma1 <= sp.sigma2) {
        ClosedForm f = rem_free_energy(beta, sp.v12());
        return {f.value, "sigma1<=sigma2: rem(V12), " + f.branch};
    }
    const double f1 = rem_free_energy(beta, sp.sigma1 * sp.sigma1).value;
    const double f2 = rem_free_energy(beta, sp.sigma2 * sp.sigma2).value;
    return {sp.alpha * f1 + (1.0 - sp.alpha) * f2, "sigma1>sigma2: two-level"};
}

ClosedForm overlap_limit(double beta, double r) {
    if (r < 0.0 || r > 1.0)
        throw std::invalid_argument("overlap_limit: r outside [0, 1]");
    if (beta <= beta_critical())
        return {1.0, "high-temperature: all overlap mass at zero"};
    if (r == 1.0) return {1.0, "low-temperature: r = 1"};
    return {beta_critical() / beta, "low-temperature: interior"};
}

ClosedForm gamma_max(const SigmaPair& sp) {
    if (sp.sigma1 <= sp.sigma2)
        return {std::sqrt(sp.v12()), "sigma1<=sigma2: sqrt(V12)"};
    return {sp.sigma1 * sp.alpha + sp.sigma2 * (1.0 - sp.alpha),
            "sigma1>sigma2: weighted mean"};
}

ClosedForm highpoint_exponent(double gamma, const SigmaPair& sp) {
    const double gmax = gamma_max(sp).value;
    if (gamma < 0.0 || gamma >= gmax)
        throw std::invalid_argument(
            "highpoint_exponent: gamma outside [0, gamma_max)");
    const double v12 = sp.v12();
    if (sp.sigma1 <= sp.sigma2)
        return {1.0 - gamma * gamma / v12, "single-branch"};
    const double gamma_crit = v12 / sp.sigma1;
    if (gamma < gamma_crit)
        return {1.0 - gamma * gamma / v12, "below gamma_crit"};
    const double excess = gamma - sp.sigma1 * sp.alpha;
    return {(1.0 - sp.alpha) -
                excess * excess / (sp.sigma2 * sp.sigma2 * (1.0 - sp.alpha)),
            "above gamma_crit"};
}

ClosedForm free_energy_u_derivative(double beta, double alpha, int side) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument(
            "free_energy_u_derivative: alpha outside (0, 1)");
    if (beta <= beta_critical())
        throw std::invalid_argument(
            "free_energy_u_derivative: beta must exceed beta_c");
    const double value = beta_critical() / beta * (1.0 - alpha);
    return {value, side >= 0 ? "right" : "left"};
}

namespace {

// Quadratic piece p(g) = base - (g - center)^2 / denom + slope * g on
// [lo, hi]: maximum at the clamped stationary point.
CurveMax max_quadratic(double base, double center, double denom, double slope,
                       double lo, double hi) {
    double g = std::clamp(center + 0.5 * slope * denom, lo, hi);
    auto eval = [&](double x) {
        return base - (x - center) * (x - center) / denom + slope * x;
    };
    CurveMax best{g, eval(g)};
    for (double x : {lo, hi})
        if (eval(x) > best.value) best = {x, eval(x)};
    return best;
}

}  // namespace

CurveMax exponent_curve_max(double beta, const SigmaPair& sp) {
    if (beta < 0.0) throw std::invalid_argument("exponent_curve_max: beta < 0");
    const double slope = std::sqrt(2.0 / M_PI) * beta;
    const double gmax = gamma_max(sp).value;
    const double v12 = sp.v12();

    if (sp.sigma1 <= sp.sigma2)
        return max_quadratic(1.0, 0.0, v12, slope, 0.0, gmax);

    const double gamma_crit = v12 / sp.sigma1;
    CurveMax lo = max_quadratic(1.0, 0.0, v12, slope, 0.0, gamma_crit);
    CurveMax hi = max_quadratic(1.0 - sp.alpha, sp.sigma1 * sp.alpha,
                                sp.sigma2 * sp.sigma2 * (1.0 - sp.alpha), slope,
                                gamma_crit, gmax);
    return lo.value >= hi.value ? lo : hi;
}

std::vector<double> sample_grem2(const Grem2Spec& spec, uint64_t seed) {
    if (spec.k1 < 1 || spec.k2 < 1)
        throw std::invalid_argument("sample_grem2: branch counts must be >= 1");
    if (spec.var1 < 0.0 || spec.var2 < 0.0)
        throw std::invalid_argument("sample_grem2: variances must be >= 0");
    RandomStream rng(seed);
    const double sd1 = std::sqrt(spec.var1);
    const double sd2 = std::sqrt(spec.var2);
    std::vector<double> values(static_cast<std::size_t>(spec.k1) * spec.k2);
    for (long b = 0; b < spec.k1; ++b) {
        const double level1 = sd1 * rng.gaussian();
        double* block = values.data() + static_cast<std::size_t>(b) * spec.k2;
        for (long l = 0; l < spec.k2; ++l)
            block[l] = level1 + sd2 * rng.gaussian();
    }
    return values;
}

Grem2Spec grem2_design(int n, const SigmaPair& sp) {
    const double log_n2 = 2.0 * std::log(static_cast<double>(n));
    Grem2Spec spec;
    spec.k1 = std::lround(std::pow(static_cast<double>(n), 2.0 * sp.alpha));
    spec.k2 = std::lround(
        std::pow(static_cast<double>(n), 2.0 * (1.0 - sp.alpha)));
    spec.var1 = sp.sigma1 * sp.sigma1 * sp.alpha / M_PI * log_n2;
    spec.var2 = sp.sigma2 * sp.sigma2 * (1.0 - sp.alpha) / M_PI * log_n2;
    return spec;
}

double grem2_free_energy_mc(const Grem2Spec& spec, double beta, int reps,
                            uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("grem2_free_energy_mc: reps < 1");
    const double log_leaves =
        std::log(static_cast<double>(spec.k1) * static_cast<double>(spec.k2));
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> values =
            sample_grem2(spec, derive_seed(seed, r, TaskKind::grem_sample));
        acc += log_partition(values, beta) / log_leaves;
    }
    return acc / reps;
}

}  // namespace dgff
