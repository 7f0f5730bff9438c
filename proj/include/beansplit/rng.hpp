#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace beansplit {

// Deterministic random source. std::mt19937's output sequence is pinned by
// the standard, but the std distribution adapters are not, so uniforms and
// normals are derived here explicitly.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : seed_(seed), engine_(seed) {}

    std::uint32_t seed() const { return seed_; }

    std::uint32_t next_u32() { return engine_(); }

    // uniform in [0,1) with 53 random bits
    double uniform() {
        const std::uint64_t hi = engine_();
        const std::uint64_t lo = engine_();
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n), n > 0
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    // Box-Muller
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Fisher-Yates, identical order on every platform
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    // independent child stream k (simulation run k of a master seed)
    Rng child(std::uint32_t k) const {
        std::uint64_t x = (static_cast<std::uint64_t>(seed_) << 32) ^ (0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(k) + 1));
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        return Rng(static_cast<std::uint32_t>(x ^ (x >> 32)));
    }

private:
    std::uint32_t seed_;
    std::mt19937 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace beansplit
