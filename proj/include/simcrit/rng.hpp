#pragma once

#include <cmath>
#include <cstdint>

// Deterministic random streams. Each replication owns a stream derived from
// (master_seed, rep) by a SplitMix64 mix, so results do not depend on worker
// scheduling. The engine is xoshiro256++; variates use explicit polar /
// inverse-CDF constructions (documented per method) so sequences are
// reproducible across platforms and standard libraries.
namespace simcrit::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
public:
    Stream(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t sm = master_seed ^ (0x632BE59BD9B4E019ULL * (stream_id + 1));
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on the open interval (0, 1): (n + 0.5) * 2^-52 with n < 2^52
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }

    bool bernoulli(double p) { return uniform_open() < p; }

    // polar (Marsaglia) method with the spare variate cached
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, w;
        do {
            u = 2.0 * uniform_open() - 1.0;
            v = 2.0 * uniform_open() - 1.0;
            w = u * u + v * v;
        } while (w >= 1.0 || w == 0.0);
        const double f = std::sqrt(-2.0 * std::log(w) / w);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Bailey's polar method; exact for any df > 0
    double student_t(double df) {
        double u, v, w;
        do {
            u = 2.0 * uniform_open() - 1.0;
            v = 2.0 * uniform_open() - 1.0;
            w = u * u + v * v;
        } while (w >= 1.0 || w == 0.0);
        return u * std::sqrt(df * (std::pow(w, -2.0 / df) - 1.0) / w);
    }

    // inverse CDF: tan(pi (u - 1/2))
    double cauchy() { return std::tan(3.14159265358979323846 * (uniform_open() - 0.5)); }

    // inverse CDF, unit scale
    double laplace() {
        const double s = uniform_open() - 0.5;
        return (s < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::fabs(s));
    }

    // inverse CDF Exp(1), centered to mean zero
    double exponential_centered() { return -std::log(uniform_open()) - 1.0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace simcrit::rng
