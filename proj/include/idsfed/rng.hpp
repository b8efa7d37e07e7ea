#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

// Seeded randomness helpers. Every stochastic operation in the library draws
// through these so that results depend only on (seed, salts) and not on the
// standard library's unspecified distribution algorithms.

namespace idsfed::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and up to two salts,
// e.g. (tree index), (round, client id). Order-sensitive.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

inline Engine make_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Engine(mix_seed(seed, a, b));
}

// Unbiased draw from [0, n).
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = eng();
    while (v >= limit) v = eng();
    return v % n;
}

// Uniform double in [0, 1).
inline double uniform_real(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1]; safe under log().
inline double uniform_positive(Engine& eng) { return 1.0 - uniform_real(eng); }

// Standard normal via Marsaglia's polar method. The paired deviate is
// discarded so call sites stay stateless.
inline double normal(Engine& eng) {
    double u, v, s;
    do {
        u = 2.0 * uniform_real(eng) - 1.0;
        v = 2.0 * uniform_real(eng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

// Gamma(alpha, 1) via Marsaglia-Tsang; alpha < 1 handled with the usual
// Gamma(alpha+1) boost.
inline double gamma_draw(Engine& eng, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("gamma_draw: alpha must be positive");
    if (alpha < 1.0) {
        const double boost = std::pow(uniform_positive(eng), 1.0 / alpha);
        return gamma_draw(eng, alpha + 1.0) * boost;
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = normal(eng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_positive(eng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

// Symmetric Dirichlet(alpha * 1_k) draw on the k-simplex.
inline std::vector<double> dirichlet(Engine& eng, double alpha, std::size_t k) {
    std::vector<double> p(k);
    for (;;) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = gamma_draw(eng, alpha);
            sum += p[i];
        }
        if (sum > 0.0 && std::isfinite(sum)) {
            for (double& x : p) x /= sum;
            return p;
        }
        // all draws underflowed to zero (tiny alpha); redraw
    }
}

// Fisher-Yates shuffle; algorithm pinned here rather than delegated to
// std::shuffle so draw sequences stay stable.
template <class T>
void shuffle(Engine& eng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[uniform_index(eng, i)]);
    }
}

// k distinct values from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(Engine& eng, std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(eng, n - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace idsfed::rng
