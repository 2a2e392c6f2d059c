#pragma once
#include <cmath>
#include <cstdint>

namespace corrcam {

// Counter-free splitmix64 stream.  Deliberately not std::mt19937: frame m's
// stream is derived from (seed, domain, m) alone, so any frame can be
// regenerated in isolation and results are identical no matter how work is
// split across threads.  All distributions below are hand-rolled so the byte
// stream is pinned by this header, not by a library's implementation choices.
class RngStream {
public:
    explicit RngStream(uint64_t state) : s_(state) {}

    static uint64_t mix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    // Stream for (seed, domain, index).  Domains keep unrelated consumers
    // (frame render, standalone pair sampling, dark counts) decorrelated even
    // at equal index.
    static RngStream derive(uint64_t seed, uint64_t domain, uint64_t index) {
        uint64_t h = mix(seed ^ (0xd1b54a32d192ed03ull * (domain + 1)));
        h = mix(h + index);
        return RngStream(h);
    }

    uint64_t u64() {
        s_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = s_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // Uniform in [-0.5, 0.5) — sub-pixel jitter.
    double jitter() { return uniform() - 0.5; }

    // Box-Muller with cached spare.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // Exact Knuth product method, chunked so it stays exact for large means
    // (Poisson(a+b) = Poisson(a) + Poisson(b)).
    uint64_t poisson(double mean) {
        uint64_t n = 0;
        while (mean > 50.0) {
            n += poisson_small_(50.0);
            mean -= 50.0;
        }
        return n + poisson_small_(mean);
    }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -mean * std::log(u);
    }

private:
    uint64_t poisson_small_(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    uint64_t s_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace corrcam
