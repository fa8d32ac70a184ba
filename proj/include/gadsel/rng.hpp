#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace gadsel {

// Deterministic random source. The mt19937_64 engine sequence is pinned by
// the standard; the distribution transforms are hand-rolled because the
// standard library's distribution algorithms are implementation-defined and
// would break byte-identical reruns.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; always consumes exactly two engine draws.
    double normal() {
        double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

    // Unbiased integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = engine_();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);
        return r;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct values from [0, n), in random order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                        std::size_t k) {
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gadsel
