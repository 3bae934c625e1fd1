#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace harmlab {

// SplitMix64, used for seeding and for deriving independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with an explicit Box-Muller gaussian. Streams are derived
// from (master, key...) by hashing, so replicate r of degree ell sees the
// same numbers no matter how many other replicates run or in what order.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t s = master;
        std::uint64_t h = splitmix64(s);
        s ^= a * 0xA24BAED4963EE407ULL;
        h ^= splitmix64(s);
        s ^= b * 0x9FB21C651E98DF25ULL;
        h ^= splitmix64(s);
        s ^= c * 0xD6E8FEB86659FD93ULL;
        h ^= splitmix64(s);
        return Rng(h);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on (0,1), never exactly 0 or 1
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // Box-Muller
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Per-replicate seed: depends only on (master, ell, r), so adding degrees
// or replicates never perturbs existing rows.
inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t ell, std::uint64_t r) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= (ell + 1) * 0xA24BAED4963EE407ULL;
    h ^= splitmix64(s);
    s ^= (r + 1) * 0x9FB21C651E98DF25ULL;
    h ^= splitmix64(s);
    return h;
}

}  // namespace harmlab
