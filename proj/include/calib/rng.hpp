#pragma once

// Seeded RNG wrapper. Draws go through our own canonical conversions so
// that trajectories are bit-reproducible across standard libraries
// (std::uniform_real_distribution is implementation-defined).

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "calib/linalg.hpp"

namespace calib {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    // derive an independent stream (e.g. strategy vs nature randomness)
    Rng fork(std::uint64_t stream) const {
        return Rng(splitmix64(seed_ ^ (0x632BE59BD9B4E019ull * (stream + 1))));
    }

    std::uint64_t next_u64() { return gen_(); }

    // uniform double in [0,1)
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index drawn from a probability vector by CDF inversion; trailing mass
    // goes to the last index
    int sample(const Vec& probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return int(i);
        }
        return int(probs.size()) - 1;
    }

    // random point of the simplex Delta(n) (Dirichlet(1,...,1))
    Vec simplex_point(int n) {
        Vec e(n);
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double u = uniform();
            if (u <= 0.0) u = 0x1.0p-53;
            e[i] = -std::log(u);
            s += e[i];
        }
        for (int i = 0; i < n; ++i) e[i] /= s;
        return e;
    }

    Vec uniform_vec(int n, double lo, double hi) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    // uniform direction on the unit sphere in R^d
    Vec unit_vector(int d) {
        Vec v(d);
        while (true) {
            for (int i = 0; i < d; ++i) {
                const double u1 = std::max(uniform(), 0x1.0p-53);
                const double u2 = uniform();
                v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
            }
            const double n = norm(v);
            if (n > 1e-8) {
                for (int i = 0; i < d; ++i) v[i] /= n;
                return v;
            }
        }
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace calib
