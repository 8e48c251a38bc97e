#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cupid {

// splitmix64 step; used for seed derivation so that sub-streams are decorrelated.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic combination of a base seed with stream tags.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t x = splitmix64(s);
    s = x ^ (b + 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b), c);
}

// Seeded RNG with explicitly implemented distributions. mt19937_64 is fully
// specified by the standard; std::normal_distribution is not, so Box-Muller
// is done by hand to keep outputs bit-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n); modulo bias is ~n/2^64 and irrelevant at the sizes used here.
    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(gen_() % static_cast<std::uint64_t>(n));
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::vector<double> normal_vec(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) {
            v = normal();
        }
        return out;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cupid
