#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace tgem {

/// SplitMix64 finalizer. Used to derive independent seeds from a base seed.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(base) ^ (stream + 0x632be59bd9b4e019ULL));
}

/// Random source with a fixed algorithm and draw procedure.
///
/// The engine is mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard library distributions are implementation-defined,
/// so uniforms and exponentials are derived here by hand: a uniform is the
/// top 53 bits of one engine output scaled to [0,1), an exponential with
/// rate r is -log1p(-u)/r from one uniform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    [[nodiscard]] double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Exponential draw; infinity when the rate is zero.
    [[nodiscard]] double exponential(double rate) {
        if (rate <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        return -std::log1p(-uniform()) / rate;
    }

    /// Uniform integer in [0, n). n must be positive.
    [[nodiscard]] std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    [[nodiscard]] bool bernoulli(double p) { return uniform() < p; }

    /// Failures before the first success, P(k) = p (1-p)^k.
    [[nodiscard]] std::size_t geometric(double p) {
        std::size_t k = 0;
        while (!bernoulli(p)) {
            ++k;
        }
        return k;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tgem
