// Copyright Contributors to the VoxSyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace voxsyn {

// splitmix64. All randomized stages derive per-item streams from (seed, tags)
// so results are independent of thread count and platform; std::random
// distributions are avoided because their output is implementation-defined.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate small consecutive seeds
        (void)splitmix64(state_);
        (void)splitmix64(state_);
    }
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1))) {}
    Rng(std::uint64_t seed, std::uint64_t s1, std::uint64_t s2)
        : Rng(seed ^ (0x9e3779b97f4a7c15ull * (s1 + 1)) ^ (0xc2b2ae3d27d4eb4full * (s2 + 1))) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // inclusive bounds
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = std::uint64_t(hi - lo) + 1;
        return lo + std::int64_t(next_u64() % span);
    }

    // Box-Muller, spare cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace voxsyn
