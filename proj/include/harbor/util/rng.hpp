#ifndef HARBOR_UTIL_RNG_HPP
#define HARBOR_UTIL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace harbor {

/// Deterministic RNG used everywhere randomness is needed.
///
/// The engine is std::mt19937_64 (fully specified by the standard, so streams
/// are identical across platforms and compilers) but all distributions are
/// implemented here because the standard library's distribution objects are
/// implementation-defined. Substreams derived from (seed, stream) make
/// parallel runs reproducible independent of thread count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Independent substream for (seed, stream). Mixing is splitmix64 so that
    /// nearby stream indices land far apart in engine seed space.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, n). Rejection sampling on the top bits.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x > limit);
        return x % n;
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t int_in(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
    /// so the stream position after k draws is always 2k.
    double normal() {
        double u1;
        do {
            u1 = next_unit();
        } while (u1 <= 0.0);
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    /// Fisher-Yates shuffle driven by below().
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

} // namespace harbor

#endif
