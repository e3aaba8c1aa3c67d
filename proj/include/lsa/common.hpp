#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lsa {

using TimeMs = std::int64_t;
using NeuronId = std::uint32_t;

/// Marks "never spiked" in last-spike bookkeeping.
inline constexpr TimeMs kNever = std::numeric_limits<TimeMs>::min() / 2;

/// Invalid configuration: bad key, impossible topology, target outside the
/// input set, and so on. The message names the offending item.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A neuron state variable became NaN or infinite.
class NumericalFault : public std::runtime_error {
public:
    NumericalFault(NeuronId neuron, TimeMs t)
        : std::runtime_error("non-finite membrane state in neuron " + std::to_string(neuron) +
                             " at t=" + std::to_string(t) + " ms"),
          neuron_(neuron), time_(t) {}

    NeuronId neuron() const noexcept { return neuron_; }
    TimeMs time() const noexcept { return time_; }

private:
    NeuronId neuron_;
    TimeMs time_;
};

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    return mix_seed(seed ^ mix_seed(salt));
}

/// FNV-1a, stable across platforms; used for config hashes and seed salts.
inline std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Stream salts so the builder and the noise source never share draws.
inline constexpr std::uint64_t kTopologyStream = 0x746f706fULL;
inline constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;
inline constexpr std::uint64_t kEnvStream = 0x656e7631ULL;
inline constexpr std::uint64_t kYokedSourceStream = 0x796f6b65ULL;

}  // namespace lsa
