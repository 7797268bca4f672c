#pragma once

#include <cstdint>

namespace mbcool {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of trajectory `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Counter-based stream: the n-th draw is a pure function of (key, n), so
/// draws do not depend on evaluation order or on which thread runs them.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    std::uint64_t bits(std::uint64_t counter) const;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const;

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace mbcool
