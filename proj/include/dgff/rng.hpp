#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dgff {

inline uint64_t splitmix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Task kinds used to split one master seed into independent streams.
enum class TaskKind : uint64_t {
    field_sample = 1,
    gibbs_draw = 2,
    pd_sample = 3,
    grem_sample = 4,
    walk_sim = 5,
    replica_pairs = 6,
};

/// Collision-resistant 64-bit mixing of (master seed, task id, task kind).
/// The result does not depend on worker count or scheduling order.
inline uint64_t derive_seed(uint64_t master, uint64_t task_id, TaskKind kind) {
    uint64_t x = splitmix64(master + 0x9E3779B97F4A7C15ULL * (task_id + 1));
    x = splitmix64(x + 0xBF58476D1CE4E5B9ULL * (static_cast<uint64_t>(kind) + 1));
    return x;
}

/// Seeded random stream with explicitly-specified variate mappings, so that
/// outputs are reproducible across standard-library implementations.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : eng_(splitmix64(seed)) {}

    uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the spare value is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = u01();
        double u2 = u01();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Exponential with unit rate.
    double exponential() { return -std::log1p(-u01()); }

    /// Unbiased uniform integer in [0, n).
    uint64_t bounded(uint64_t n) {
        uint64_t t = (-n) % n;  // 2^64 mod n
        uint64_t x;
        do {
            x = eng_();
        } while (x < t);
        return x % n;
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dgff
