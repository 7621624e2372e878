#pragma once

#include <cstdint>

namespace cmdpsim {

// Purpose tags keep the random streams of unrelated simulation steps disjoint:
// cost rollouts, value rollouts, instance generation and seed derivation never
// share draws even when they agree on policy and iteration indices.
enum class StreamPurpose : std::uint64_t {
    kCostSim = 1,
    kValueSim = 2,
    kInstanceGen = 3,
    kPolicyGen = 4,
    kSeedDerive = 5,
};

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    return mix64((h + kGolden) ^ mix64(v + kGolden));
}

} // namespace detail

// Counter-based uniform stream keyed by (seed, purpose, policy, iteration).
// The n-th draw is a pure function of the key and n, so a stream can be
// replayed from its key alone and distinct keys give independent streams.
class RngStream {
  public:
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t policy,
              std::uint64_t iteration) {
        std::uint64_t h = detail::mix64(seed + detail::kGolden);
        h = detail::combine(h, static_cast<std::uint64_t>(purpose));
        h = detail::combine(h, policy);
        h = detail::combine(h, iteration);
        key_ = h;
    }

    std::uint64_t next_u64() {
        return detail::mix64(key_ ^ detail::mix64(counter_++ + detail::kGolden));
    }

    // Uniform draw in [0,1) with 53 bits of precision.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const { return key_; }
    std::uint64_t draws() const { return counter_; }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Child seed for a replication or sweep cell; deterministic in all arguments.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t h = detail::mix64(master + detail::kGolden);
    h = detail::combine(h, static_cast<std::uint64_t>(StreamPurpose::kSeedDerive));
    h = detail::combine(h, a);
    h = detail::combine(h, b);
    h = detail::combine(h, c);
    return h;
}

} // namespace cmdpsim
