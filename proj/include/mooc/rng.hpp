#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace mooc {

/// Portable seeded random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard distributions are not (libstdc++ and libc++ derive
/// different values from the same engine), so every derived quantity is
/// computed here from raw 64-bit draws:
///
///   uniform01()      (draw >> 11) * 2^-53, in [0, 1)
///   below(n)         Lemire's multiply-shift with rejection, in [0, n)
///   poisson(lambda)  Knuth's product-of-uniforms method
///   shuffle(v)       Fisher-Yates from the back, one below(i + 1) per step
///
/// Each call consumes draws in program order, so a given seed reproduces the
/// same values on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n);

    // Inclusive on both ends.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t poisson(double lambda);

    // Standard normal via Box-Muller (one value per two uniforms, no caching).
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Sorted sample of k distinct values from [0, n).
    std::vector<std::size_t> sample_sorted(std::size_t n, std::size_t k);

    // Derives an independent child seed; used to give each component its own stream.
    std::uint64_t fork() { return next() ^ 0x9e3779b97f4a7c15ULL; }

private:
    std::mt19937_64 engine_;
};

}  // namespace mooc
