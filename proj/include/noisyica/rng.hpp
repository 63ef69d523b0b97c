#ifndef NOISYICA_RNG_HPP
#define NOISYICA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "noisyica/types.hpp"

namespace noisyica {

/// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic random generator: std::mt19937_64 stream with hand-rolled
/// distributions, so a (seed, draw-order) pair pins every sample exactly.
/// std::* distributions are implementation-defined and are not used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Independent generator for a named sub-stream (run index, probe index, ...).
    Rng derive(std::uint64_t stream) const {
        return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x51ed2701)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; generates pairs, caches the spare.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Exponential with the given rate, by inversion.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    /// Laplace(0, scale) by inversion.
    double laplace(double scale) {
        const double u = uniform01() - 0.5;
        return -scale * std::copysign(std::log1p(-2.0 * std::abs(u)), u);
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape < 1 boosted.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            double u = uniform01();
            while (u <= 0.0) u = uniform01();
            return g * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z = normal();
            double v = 1.0 + c * z;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Student-t with dof degrees of freedom: normal / sqrt(chi2/dof).
    double student_t(double dof) {
        const double z = normal();
        const double chi2 = 2.0 * gamma(dof / 2.0);
        return z / std::sqrt(chi2 / dof);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection keeps the draw unbiased
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    /// Vector of iid standard normals.
    Vector normal_vector(Index k) {
        Vector v(k);
        for (Index i = 0; i < k; ++i) v(i) = normal();
        return v;
    }

    /// Uniform direction on the unit sphere in R^k.
    Vector unit_vector(Index k) {
        Vector v = normal_vector(k);
        double nrm = v.norm();
        while (nrm < 1e-12) {
            v = normal_vector(k);
            nrm = v.norm();
        }
        return v / nrm;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace noisyica

#endif // NOISYICA_RNG_HPP
