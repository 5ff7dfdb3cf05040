#include "dgff/pd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dgff/closedform.hpp"
#include "dgff/gibbs.hpp"
#include "dgff/rng.hpp"

namespace dgff {

PDWeights sample_pd(double alpha, int atoms, uint64_t seed) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("sample_pd: alpha must lie in (0, 1)");
    if (atoms < 1) throw std::invalid_argument("sample_pd: atoms < 1");

    PDWeights out;
    out.alpha = alpha;
    out.atoms = atoms;
    out.weights.resize(atoms);

    RandomStream rng(seed);
    const double inv_alpha = 1.0 / alpha;
    double arrival = 0.0;
    double total = 0.0;
    for (int k = 0; k < atoms; ++k) {
        arrival += rng.exponential();
        const double eta = std::pow(arrival, -inv_alpha);
        out.weights[k] = eta;
        total += eta;
    }
    // Expected unnormalized mass of the atoms beyond Gamma_K:
    // integral of t^(-1/alpha) over (Gamma_K, inf).
    out.tail_estimate =
        std::pow(arrival, 1.0 - inv_alpha) * alpha / (1.0 - alpha);
    const double norm = total + out.tail_estimate;
    for (double& w : out.weights) w /= norm;
    out.retained_sum = total / norm;
    return out;
}

namespace {

// Restricted growth strings enumerate the set partitions of [s].
void enumerate_partitions(int s, std::vector<std::vector<int>>& out) {
    std::vector<int> rgs(s, 0);
    auto rec = [&](auto&& self, int pos, int max_label) -> void {
        if (pos == s) {
            out.push_back(rgs);
            return;
        }
        for (int label = 0; label <= max_label + 1; ++label) {
            rgs[pos] = label;
            self(self, pos + 1, std::max(max_label, label));
        }
    };
    rec(rec, 1, 0);  // rgs[0] = 0 fixed
}

// First-occurrence pattern for F: block_id[l] = smallest replica with the
// same label as l.
std::vector<int> canonical_pattern(const std::vector<int>& rgs) {
    std::vector<int> pattern(rgs.size());
    for (std::size_t l = 0; l < rgs.size(); ++l) {
        std::size_t first = l;
        for (std::size_t m = 0; m < l; ++m)
            if (rgs[m] == rgs[l]) {
                first = m;
                break;
            }
        pattern[l] = static_cast<int>(first);
    }
    return pattern;
}

std::vector<int> block_sizes(const std::vector<int>& rgs) {
    int labels = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<int> sizes(labels, 0);
    for (int v : rgs) ++sizes[v];
    return sizes;
}

// Distinct-atom partition sums m(pi) from power sums, by Moebius-style
// peeling: prod_b p_{|b|} counts every coarsening once.
class PartitionWeights {
public:
    explicit PartitionWeights(int s) : s_(s) {
        enumerate_partitions(s, partitions_);
    }

    const std::vector<std::vector<int>>& partitions() const {
        return partitions_;
    }

    std::vector<double> distinct_sums(const std::vector<double>& power) const {
        const std::size_t count = partitions_.size();
        std::vector<double> m(count, 0.0);
        // Coarsest partitions first: the peel for pi subtracts m at every
        // strict coarsening, which has fewer blocks.
        std::vector<std::size_t> order(count);
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return blocks(a) < blocks(b);
        });
        std::map<std::vector<int>, std::size_t> index;
        for (std::size_t i = 0; i < count; ++i) index[partitions_[i]] = i;

        for (std::size_t oi : order) {
            const std::vector<int>& rgs = partitions_[oi];
            const std::vector<int> sizes = block_sizes(rgs);
            double value = 1.0;
            for (int sz : sizes) value *= power[sz];
            // subtract every strict coarsening (a partition of the blocks)
            std::vector<std::vector<int>> groupings;
            enumerate_partitions(static_cast<int>(sizes.size()), groupings);
            for (const auto& grouping : groupings) {
                if (*std::max_element(grouping.begin(), grouping.end()) ==
                    static_cast<int>(sizes.size()) - 1)
                    continue;  // the discrete grouping is pi itself
                std::vector<int> merged(rgs.size());
                for (std::size_t l = 0; l < rgs.size(); ++l)
                    merged[l] = grouping[rgs[l]];
                value -= m[index.at(normalize(merged))];
            }
            m[oi] = value;
        }
        return m;
    }

private:
    static std::vector<int> normalize(const std::vector<int>& labels) {
        std::vector<int> out(labels.size());
        std::map<int, int> seen;
        int next = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            auto [it, inserted] = seen.emplace(labels[i], next);
            if (inserted) ++next;
            out[i] = it->second;
        }
        return out;
    }

    int blocks(std::size_t i) const {
        return *std::max_element(partitions_[i].begin(), partitions_[i].end()) +
               1;
    }

    int s_;
    std::vector<std::vector<int>> partitions_;
};

}  // namespace

PdMoment pd_replica_moment(double alpha, int s, const PatternFunction& f,
                           long samples, int atoms, uint64_t seed,
                           long index_draws_per_sample) {
    if (s < 2) throw std::invalid_argument("pd_replica_moment: need s >= 2");
    if (samples < 1)
        throw std::invalid_argument("pd_replica_moment: samples < 1");

    const bool exact = s <= 4;
    PartitionWeights table(exact ? s : 2);

    std::vector<double> f_values;
    std::vector<std::vector<int>> patterns;
    if (exact) {
        for (const auto& rgs : table.partitions())
            patterns.push_back(canonical_pattern(rgs));
        f_values.resize(patterns.size());
        for (std::size_t i = 0; i < patterns.size(); ++i)
            f_values[i] = f(patterns[i]);
    }

    double acc = 0.0;
    double acc_sq = 0.0;
    for (long rep = 0; rep < samples; ++rep) {
        PDWeights pd =
            sample_pd(alpha, atoms, derive_seed(seed, rep, TaskKind::pd_sample));
        // renormalize retained weights so the product measure has total mass 1
        std::vector<double> xi = pd.weights;
        double total = 0.0;
        for (double w : xi) total += w;
        for (double& w : xi) w /= total;

        double estimate = 0.0;
        if (exact) {
            std::vector<double> power(s + 1, 0.0);
            for (double w : xi) {
                double p = w;
                for (int r = 1; r <= s; ++r) {
                    power[r] += p;
                    p *= w;
                }
            }
            std::vector<double> m = table.distinct_sums(power);
            for (std::size_t i = 0; i < m.size(); ++i)
                estimate += m[i] * f_values[i];
        } else {
            AliasTable alias(xi);
            RandomStream rng(
                derive_seed(seed, rep, TaskKind::replica_pairs));
            std::vector<int> indices(s);
            double inner = 0.0;
            for (long d = 0; d < index_draws_per_sample; ++d) {
                for (int l = 0; l < s; ++l)
                    indices[l] = static_cast<int>(alias.sample(rng));
                std::vector<int> pattern(s);
                for (int l = 0; l < s; ++l) {
                    int first = l;
                    for (int mm = 0; mm < l; ++mm)
                        if (indices[mm] == indices[l]) {
                            first = mm;
                            break;
                        }
                    pattern[l] = first;
                }
                inner += f(pattern);
            }
            estimate = inner / static_cast<double>(index_draws_per_sample);
        }
        acc += estimate;
        acc_sq += estimate * estimate;
    }

    PdMoment out;
    out.samples = samples;
    out.value = acc / static_cast<double>(samples);
    if (samples > 1) {
        const double var =
            (acc_sq - acc * acc / samples) / static_cast<double>(samples - 1);
        out.stderr_ = std::sqrt(std::max(0.0, var) / samples);
    }
    return out;
}

PdFieldComparison pd_vs_field_overlap(double beta, const OverlapHistogram& hist,
                                      long pd_samples, int pd_atoms,
                                      uint64_t seed, double r_interior) {
    if (beta <= beta_critical())
        throw std::invalid_argument(
            "pd_vs_field_overlap: beta must exceed beta_c");
    PdFieldComparison out;
    out.beta = beta;
    out.alpha = beta_critical() / beta;
    out.r_interior = r_interior;
    out.interior_target = out.alpha;
    out.x_interior = hist.value_at(r_interior);

    const double pos = r_interior * static_cast<double>(hist.grid.size() - 1);
    std::size_t gi = std::min(static_cast<std::size_t>(std::lround(pos)),
                              hist.grid.size() - 1);
    out.x_stderr = hist.stderr_[gi];
    out.interior_gap = std::abs(out.x_interior - out.interior_target);

    PdMoment coincidence = pd_replica_moment(
        out.alpha, 2,
        [](const std::vector<int>& pattern) {
            return pattern[1] == 0 ? 1.0 : 0.0;
        },
        pd_samples, pd_atoms, seed);
    out.pd_coincidence = coincidence.value;
    out.pd_stderr = coincidence.stderr_;
    out.consistency_gap =
        std::abs((1.0 - out.x_interior) - out.pd_coincidence);
    return out;
}

}  // namespace dgff
