#pragma once

// Invariant measures of nonnegative matrices: lambda >= 0, sum lambda = 1,
// and for every l
//     sum_k lambda(k) U^{kl} = lambda(l) sum_k U^{lk}.
// Existence follows from Perron-Frobenius applied to the stochastic matrix
// Q = I + (U - diag(rowsum))/mu with mu >= max rowsum: invariant measures of
// U are exactly stationary distributions of Q.

#include <algorithm>
#include <cmath>

#include "calib/linalg.hpp"

namespace calib {

inline double balance_residual(const Mat& U, const Vec& lambda) {
    const int L = U.rows;
    double worst = 0.0;
    for (int l = 0; l < L; ++l) {
        double in = 0.0, out = 0.0;
        for (int k = 0; k < L; ++k) {
            in += lambda[k] * U(k, l);
            out += U(l, k);
        }
        worst = std::max(worst, std::abs(in - lambda[l] * out));
    }
    return worst;
}

namespace detail {

// stationary distribution of the lazy chain (I+Q)/2 by power iteration with
// Cesaro averaging; always produces a nonnegative normalized vector
inline Vec stationary_power(const Mat& Q) {
    const int L = Q.rows;
    Vec x(L, 1.0 / L), avg(L, 0.0);
    Vec next(L, 0.0);
    Vec best = x;
    double best_res = kInf;
    for (int it = 1; it <= 200000; ++it) {
        for (int l = 0; l < L; ++l) {
            double s = 0.0;
            for (int k = 0; k < L; ++k) s += x[k] * Q(k, l);
            next[l] = 0.5 * (x[l] + s);
        }
        double tot = 0.0;
        for (double v : next) tot += std::max(v, 0.0);
        for (int l = 0; l < L; ++l) x[l] = std::max(next[l], 0.0) / tot;
        for (int l = 0; l < L; ++l) avg[l] += (x[l] - avg[l]) / it;
        if (it % 64 == 0) {
            double diff = 0.0;
            for (int l = 0; l < L; ++l) diff = std::max(diff, std::abs(next[l] - x[l]));
            Vec cand = avg;
            double s = 0.0;
            for (double v : cand) s += v;
            for (double& v : cand) v /= s;
            double res = 0.0;
            for (int l = 0; l < L; ++l) {
                double in = 0.0;
                for (int k = 0; k < L; ++k) in += cand[k] * Q(k, l);
                res = std::max(res, std::abs(in - cand[l]));
            }
            if (res < best_res) {
                best_res = res;
                best = cand;
            }
            if (res < 1e-14) break;
        }
    }
    return best;
}

}  // namespace detail

// Returns a probability vector lambda with the balance property above.
// Deterministic: unique measures come from a direct solve; for U = 0 the
// uniform distribution is returned by convention; rank-deficient systems
// fall back to a least-squares solution projected to the simplex, then to
// power iteration.
inline Vec invariant_measure(const Mat& U) {
    const int L = U.rows;
    if (L == 0) return {};
    if (L == 1) return {1.0};

    const double umax = U.max_abs();
    if (umax == 0.0) return Vec(L, 1.0 / L);

    Vec rowsum(L, 0.0);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < L; ++k) rowsum[l] += U(l, k);

    if (L == 2) {
        // balance reduces to lambda(1) U^{12} = lambda(2) U^{21}
        const double u12 = U(0, 1), u21 = U(1, 0);
        const double s = u12 + u21;
        if (s <= 0.0) return {0.5, 0.5};
        return {u21 / s, u12 / s};
    }

    double mu = 0.0;
    for (double r : rowsum) mu = std::max(mu, r);
    Mat Q(L, L);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < L; ++k) Q(l, k) = (l == k ? 1.0 : 0.0) + (U(l, k) - (l == k ? rowsum[l] : 0.0)) / mu;

    // direct solve: (Q^T - I) lambda = 0 with normalization row appended
    Mat A(L + 1, L);
    Vec b(L + 1, 0.0);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < L; ++k) A(l, k) = Q(k, l) - (k == l ? 1.0 : 0.0);
    for (int k = 0; k < L; ++k) A(L, k) = 1.0;
    b[L] = 1.0;
    Vec lam = lstsq(A, b);

    // one round of residual refinement tightens the solve to ~1e-14
    {
        Vec r(L + 1, 0.0);
        for (int i = 0; i <= L; ++i) {
            double s = 0.0;
            for (int k = 0; k < L; ++k) s += A(i, k) * lam[k];
            r[i] = b[i] - s;
        }
        Vec d = lstsq(A, r);
        for (int k = 0; k < L; ++k) lam[k] += d[k];
    }

    double neg = 0.0, tot = 0.0;
    for (double v : lam) {
        neg = std::min(neg, v);
        tot += std::max(v, 0.0);
    }
    if (neg > -1e-9 && tot > 0.5) {
        Vec out(L);
        double s = 0.0;
        for (int k = 0; k < L; ++k) {
            out[k] = std::max(lam[k], 0.0);
            s += out[k];
        }
        for (double& v : out) v /= s;
        if (balance_residual(U, out) <= 1e-10 * std::max(1.0, umax)) return out;
    }

    // multiple ergodic classes or an ill-posed solve: power iteration
    Vec out = detail::stationary_power(Q);
    return out;
}

}  // namespace calib
