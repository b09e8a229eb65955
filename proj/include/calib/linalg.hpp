#pragma once

// Small dense linear algebra helpers. Everything here is desk-scale
// (dimensions in the tens), so plain O(n^3) routines with partial or
// column pivoting are used throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace calib {

using Vec = std::vector<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline double max_abs(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline Vec sub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec add(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec scaled(const Vec& a, double t) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
    return r;
}

// a += t*b
inline void axpy(Vec& a, double t, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += t * b[i];
}

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(std::size_t(r) * c, fill) {}

    double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a) s += v * v;
        return std::sqrt(s);
    }

    Vec row(int i) const {
        Vec r(cols);
        for (int j = 0; j < cols; ++j) r[j] = (*this)(i, j);
        return r;
    }
};

// Solve A x = b for square A by Gaussian elimination with partial pivoting.
// Returns false when A is numerically singular.
inline bool solve_square(Mat A, Vec b, Vec& x) {
    const int n = A.rows;
    if (A.cols != n || int(b.size()) != n) throw std::invalid_argument("solve_square: shape mismatch");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(A(i, k)) > best) {
                best = std::abs(A(i, k));
                piv = i;
            }
        }
        if (best < 1e-13) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = A(i, k) / A(k, k);
            if (f == 0.0) continue;
            for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return true;
}

// Least-squares solution of A x = b (m >= n or m < n both accepted) via
// Householder QR with column pivoting; rank-deficient columns get x = 0.
inline Vec lstsq(Mat A, Vec b, double rank_tol = 1e-11) {
    const int m = A.rows, n = A.cols;
    if (int(b.size()) != m) throw std::invalid_argument("lstsq: shape mismatch");
    std::vector<int> colp(n);
    std::iota(colp.begin(), colp.end(), 0);
    const int steps = std::min(m, n);
    double scale0 = 0.0;
    int rank = 0;
    for (int k = 0; k < steps; ++k) {
        // column pivot: largest remaining column norm
        int piv = k;
        double best = -1.0;
        for (int j = k; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < m; ++i) s += A(i, j) * A(i, j);
            if (s > best) { best = s; piv = j; }
        }
        if (k == 0) scale0 = std::sqrt(std::max(best, 0.0));
        if (std::sqrt(std::max(best, 0.0)) <= rank_tol * std::max(1.0, scale0)) break;
        if (piv != k) {
            for (int i = 0; i < m; ++i) std::swap(A(i, k), A(i, piv));
            std::swap(colp[k], colp[piv]);
        }
        // Householder reflector for column k
        double alpha = 0.0;
        for (int i = k; i < m; ++i) alpha += A(i, k) * A(i, k);
        alpha = std::sqrt(alpha);
        if (A(k, k) > 0) alpha = -alpha;
        Vec v(m - k, 0.0);
        v[0] = A(k, k) - alpha;
        for (int i = k + 1; i < m; ++i) v[i - k] = A(i, k);
        double vnorm2 = 0.0;
        for (double t : v) vnorm2 += t * t;
        if (vnorm2 > 0) {
            for (int j = k; j < n; ++j) {
                double s = 0.0;
                for (int i = k; i < m; ++i) s += v[i - k] * A(i, j);
                const double f = 2.0 * s / vnorm2;
                for (int i = k; i < m; ++i) A(i, j) -= f * v[i - k];
            }
            double s = 0.0;
            for (int i = k; i < m; ++i) s += v[i - k] * b[i];
            const double f = 2.0 * s / vnorm2;
            for (int i = k; i < m; ++i) b[i] -= f * v[i - k];
        }
        A(k, k) = alpha;
        rank = k + 1;
    }
    Vec y(n, 0.0);
    for (int i = rank - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < rank; ++j) s -= A(i, j) * y[j];
        y[i] = s / A(i, i);
    }
    Vec x(n, 0.0);
    for (int j = 0; j < n; ++j) x[colp[j]] = y[j];
    return x;
}

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double smallest_eigenvalue_sym(Mat A) {
    const int n = A.rows;
    if (n == 0) return 0.0;
    if (n == 1) return A(0, 0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-26 * std::max(1.0, A.max_abs() * A.max_abs())) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double aip = A(i, p), aiq = A(i, q);
                    A(i, p) = c * aip - s * aiq;
                    A(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const double api = A(p, i), aqi = A(q, i);
                    A(p, i) = c * api - s * aqi;
                    A(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    double lo = A(0, 0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, A(i, i));
    return lo;
}

}  // namespace calib
