#pragma once

#include <cstdint>
#include <random>

namespace sdlab {

// SplitMix64 finalizer (Steele, Lea, Flood). Used only for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed of stream `stream` under `master`:
//   split_seed(master, s) = splitmix64(splitmix64(master) ^ (s + 1))
// Replica r of any experiment uses stream r. Sub-tasks inside a replica
// derive further streams the same way from the replica seed.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ (stream + 1));
}

// mt19937_64 with a fixed double conversion so that streams are
// reproducible across standard libraries (the engine's output sequence is
// fixed by the standard, distribution objects are not).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // (0, 1)
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace sdlab
