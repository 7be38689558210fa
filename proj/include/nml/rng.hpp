#ifndef NML_RNG_HPP
#define NML_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace nml {

/// Seeded random stream. Distribution sampling is implemented here (not via
/// std::*_distribution) so that streams are reproducible independent of the
/// standard library build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Deterministic substream: mixes a root seed with a stream name and index.
    /// Named substreams keep pipeline stages decoupled under one config seed.
    static Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t k = 0) {
        std::uint64_t h = 1469598103934665603ull; // FNV-1a
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return Rng(splitmix(seed ^ h));
    }

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    /// Standard normal via Box-Muller (uncached; two uniforms per draw).
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double normal(double mu, double sd) { return mu + sd * normal(); }

    /// Poisson by inversion for small means, normal approximation otherwise.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 60.0) {
            double l = std::exp(-lambda), p = 1.0;
            int k = 0;
            do {
                ++k;
                p *= uniform();
            } while (p > l);
            return k - 1;
        }
        double v = normal(lambda, std::sqrt(lambda));
        return v < 0 ? 0 : static_cast<int>(v + 0.5);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
};

} // namespace nml

#endif
