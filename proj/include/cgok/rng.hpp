#ifndef CGOK_RNG_HPP
#define CGOK_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cgok {

/// Deterministic random source. The mt19937_64 engine is bit-exact by the
/// standard; the uniform/normal transforms below avoid std::*_distribution,
/// whose output is implementation defined, so streams are reproducible across
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard complex normal (independent N(0,1) real and imaginary parts),
    /// via one Box-Muller pair per call so the draw count is fixed.
    std::complex<double> cnormal() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

    double normal() { return cnormal().real(); }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

/// Stable per-task seed derivation (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace cgok

#endif // CGOK_RNG_HPP
