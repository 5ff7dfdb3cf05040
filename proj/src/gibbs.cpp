#include "dgff/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgff {

double log_sum_exp(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    double m = x[0];
    for (double v : x)
        if (v > m) m = v;
    double acc = 0.0;
    for (double v : x) acc += std::exp(v - m);
    return m + std::log(acc);
}

double log_partition(std::span<const double> values, double beta) {
    if (values.empty())
        throw std::invalid_argument("log_partition: empty region");
    if (beta < 0.0) throw std::invalid_argument("log_partition: beta < 0");
    double m = values[0];
    for (double v : values)
        if (v > m) m = v;
    double acc = 0.0;
    for (double v : values) acc += std::exp(beta * (v - m));
    return beta * m + std::log(acc);
}

double free_energy(std::span<const double> values, double beta, int n) {
    if (n <= 1) throw std::invalid_argument("free_energy: need N > 1");
    return log_partition(values, beta) / (2.0 * std::log(n));
}

AliasTable::AliasTable(const std::vector<double>& probabilities) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty distribution");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);

    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (probabilities[i] < 0.0)
            throw std::invalid_argument("AliasTable: negative probability");
        scaled[i] = probabilities[i] * static_cast<double>(n);
    }

    std::vector<uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));

    while (!small.empty() && !large.empty()) {
        uint32_t s = small.back();
        small.pop_back();
        uint32_t l = large.back();
        large.pop_back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (uint32_t i : large) {
        prob_[i] = 1.0;
        alias_[i] = i;
    }
    for (uint32_t i : small) {  // round-off leftovers
        prob_[i] = 1.0;
        alias_[i] = i;
    }
}

std::size_t AliasTable::sample(RandomStream& rng) const {
    const std::size_t i =
        static_cast<std::size_t>(rng.bounded(static_cast<uint64_t>(prob_.size())));
    return rng.u01() < prob_[i] ? i : alias_[i];
}

GibbsContext::GibbsContext(const VertexSet& region, std::vector<double> values,
                           double beta)
    : region_(region),
      values_(std::move(values)),
      beta_(beta),
      log_z_(log_partition(values_, beta)),
      probs_(values_.size()),
      alias_([&] {
          if (values_.size() != region.size())
              throw std::invalid_argument(
                  "GibbsContext: values/region size mismatch");
          for (std::size_t i = 0; i < values_.size(); ++i)
              probs_[i] = std::exp(beta_ * values_[i] - log_z_);
          return AliasTable(probs_);
      }()) {}

std::vector<ReplicaDraw> gibbs_sample(const GibbsContext& ctx, int replicas,
                                      int count, uint64_t seed,
                                      uint64_t disorder_id) {
    if (replicas < 1) throw std::invalid_argument("gibbs_sample: replicas < 1");
    if (count < 1) throw std::invalid_argument("gibbs_sample: count < 1");
    RandomStream rng(seed);
    std::vector<ReplicaDraw> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        ReplicaDraw draw;
        draw.disorder_id = disorder_id;
        draw.vertices.reserve(replicas);
        for (int r = 0; r < replicas; ++r)
            draw.vertices.push_back(ctx.sample_vertex(rng));
        out.push_back(std::move(draw));
    }
    return out;
}

double boundary_mass(const GibbsContext& full_box_ctx, double rho) {
    const BoxGeometry& geom = full_box_ctx.region().geometry();
    if (full_box_ctx.region().size() !=
        static_cast<std::size_t>(geom.vertex_count()))
        throw std::invalid_argument(
            "boundary_mass: context must cover the full box");
    VertexSet bulk = bulk_region(geom, rho);
    double inside = 0.0;
    const auto& members = full_box_ctx.region().members();
    const auto& probs = full_box_ctx.probabilities();
    for (std::size_t i = 0; i < members.size(); ++i)
        if (bulk.contains(members[i])) inside += probs[i];
    return std::clamp(1.0 - inside, 0.0, 1.0);
}

HighPoints high_points_count(std::span<const double> values,
                             const VertexSet& region, double gamma, int n) {
    if (gamma < 0.0)
        throw std::invalid_argument("high_points_count: gamma < 0");
    if (values.size() != region.size())
        throw std::invalid_argument("high_points_count: size mismatch");
    HighPoints out;
    out.threshold = gamma * std::sqrt(2.0 / M_PI) * 2.0 * std::log(n);
    for (double v : values)
        if (v >= out.threshold) ++out.count;
    if (out.count > 0)
        out.exponent = std::log(static_cast<double>(out.count)) /
                       (2.0 * std::log(n));
    return out;
}

}  // namespace dgff
