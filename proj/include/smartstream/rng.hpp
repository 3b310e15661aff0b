#pragma once

// Random streams for the simulator.
//
// All randomness of a run derives from one 64-bit seed. Two kinds of streams
// are used:
//
//   * sequential streams: std::mt19937_64 seeded with a SplitMix64-derived
//     key (one for arrivals, one for trace scaling, ...). mt19937_64 output is
//     fully specified by the standard, so the bits are identical on every
//     conforming platform.
//   * counter streams: a SplitMix64 hash of (seed, stream, counter). Each
//     session draws its departure point from the counter stream keyed by its
//     session id, so the draw does not depend on how many other sessions
//     exist or on the allocation strategy in use.
//
// Distribution sampling is done here rather than with <random> distributions,
// whose algorithms are implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace smartstream {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Well-known stream identifiers.
enum class stream : std::uint64_t {
    arrivals = 1,
    departures = 2,
    trace_scaling = 3,
    trace_generation = 4,
    verification = 5,
};

inline constexpr std::uint64_t derive_key(std::uint64_t seed, stream s,
                                          std::uint64_t counter = 0) noexcept {
    return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s))) + counter);
}

// 53-bit uniform in [0, 1).
inline constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double counter_uniform(std::uint64_t seed, stream s, std::uint64_t counter) noexcept {
    return to_unit(derive_key(seed, s, counter));
}

class rng {
public:
    explicit rng(std::uint64_t seed, stream s = stream::arrivals)
        : engine_(derive_key(seed, s)) {}

    double uniform() { return to_unit(engine_()); }

    // Poisson(lambda) by sequential inversion. Large means are split into
    // independent pieces (a sum of Poissons is Poisson), keeping exp(-piece)
    // far from underflow.
    std::uint64_t poisson(double lambda) {
        constexpr double max_piece = 30.0;
        std::uint64_t total = 0;
        while (lambda > 0.0) {
            double piece = lambda > max_piece ? max_piece : lambda;
            lambda -= piece;
            total += poisson_small(piece);
        }
        return total;
    }

private:
    std::uint64_t poisson_small(double lambda) {
        double u = uniform();
        double p = std::exp(-lambda);
        double cdf = p;
        std::uint64_t k = 0;
        while (u >= cdf) {
            ++k;
            p *= lambda / static_cast<double>(k);
            double next = cdf + p;
            if (next == cdf) break; // tail exhausted in double precision
            cdf = next;
        }
        return k;
    }

    std::mt19937_64 engine_;
};

} // namespace smartstream
