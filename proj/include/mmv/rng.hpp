#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mmv {

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the stream addressed by `path` under `base`, e.g.
/// derive_seed(trial_seed, {stream::matrix, j}). Order of the path matters.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

namespace stream {
inline constexpr std::uint64_t signal = 1;
inline constexpr std::uint64_t matrix = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t monte_carlo = 4;
} // namespace stream

/// Portable random source: mt19937_64 bits with hand-rolled transforms, so
/// draws are identical across standard library implementations (the
/// std:: distributions are not specified bit-for-bit).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal, Marsaglia polar method.
    double normal();

    bool bernoulli(double p) { return uniform() < p; }

    /// +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mmv
