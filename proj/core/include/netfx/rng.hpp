#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace netfx {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded RNG with self-contained distributions. std::mt19937_64 output is
/// pinned by the standard and the distributions here avoid the
/// implementation-defined std:: ones, so identical seeds give identical
/// streams on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double u01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    /// Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return u01() < p; }

    /// Knuth multiplication method, chunked so exp(-lambda) never underflows.
    std::uint32_t poisson(double lambda) {
        std::uint32_t total = 0;
        while (lambda > 500.0) {
            total += poisson_small(500.0);
            lambda -= 500.0;
        }
        return total + poisson_small(lambda);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::uint32_t poisson_small(double lambda) {
        if (lambda <= 0.0) return 0;
        const double threshold = std::exp(-lambda);
        std::uint32_t k = 0;
        double product = u01();
        while (product > threshold) {
            ++k;
            product *= u01();
        }
        return k;
    }

    std::mt19937_64 engine_;
};

}  // namespace netfx
