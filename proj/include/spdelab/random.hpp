#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace spdelab {

/// SplitMix64 output function; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Identifies one independent random stream, e.g. one trajectory.
/// Streams form a tree: child(i) names the i-th sub-stream, so draws depend
/// only on (seed, position in the tree, counter) and never on scheduling.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t id = 0;

    StreamKey child(std::uint64_t i) const { return {seed, mix64(id ^ mix64(i + 0x51ed2701ULL))}; }
    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Counter-based generator: the sequence is a pure function of (key, counter).
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(StreamKey key, std::uint64_t counter)
        : state_(mix64(key.seed ^ mix64(key.id ^ mix64(counter))))
    {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(state_ += 0x9e3779b97f4a7c15ULL); }

    double normal() { return normal_(*this); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }

private:
    std::uint64_t state_;
    std::normal_distribution<double> normal_;
};

}  // namespace spdelab
