#pragma once

#include <cmath>
#include <cstdint>

namespace qualm {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-seeded xoshiro256++ stream. Identical (seed, stream_id) pairs
/// reproduce identical sequences bit-exactly; derived streams are
/// statistically independent of the parent and of each other.
class SeededStream {
  public:
    SeededStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t x = seed ^ (0x6a09e667f3bcc909ULL * (stream_id + 1));
        for (auto& s : state_) s = splitmix64(x);
        have_cached_normal_ = false;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// New independent stream; per-trial streams use stream_id = trial index.
    SeededStream derive(std::uint64_t sub_id) const {
        std::uint64_t x = seed_ ^ (stream_id_ * 0xd1342543de82ef95ULL);
        std::uint64_t mixed = splitmix64(x) ^ sub_id;
        return SeededStream(mixed, sub_id);
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

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(a);
        have_cached_normal_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int s) { return (v << s) | (v >> (64 - s)); }

    std::uint64_t seed_, stream_id_;
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool have_cached_normal_;
};

}  // namespace qualm
