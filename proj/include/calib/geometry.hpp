#pragma once

// H-representation polytopes, vertex enumeration, Euclidean projection and
// affine charts. Everything is exact-by-enumeration at desk scale: vertex
// enumeration walks d-subsets of facets, projections are certified by the
// variational inequality and fall back to support enumeration.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "calib/errors.hpp"
#include "calib/linalg.hpp"
#include "calib/lp.hpp"

namespace calib {

// {Z : <Z,c> + b = 0}
struct Hyperplane {
    Vec c;
    double b = 0.0;

    double eval(const Vec& z) const { return dot(c, z) + b; }
};

// <Z,a> + b <= 0
struct Halfspace {
    Vec a;
    double b = 0.0;

    double eval(const Vec& z) const { return dot(a, z) + b; }
};

struct FeasibleInterior {
    double margin = -kInf;  // best normalized slack (positive inside)
    Vec point;
};

class Polytope {
  public:
    Polytope() = default;
    explicit Polytope(int dim) : dim_(dim) {}
    Polytope(int dim, std::vector<Halfspace> facets) : dim_(dim), facets_(std::move(facets)) {}

    int dim() const { return dim_; }
    const std::vector<Halfspace>& facets() const { return facets_; }

    void add_facet(Vec a, double b) { facets_.push_back({std::move(a), b}); }

    static Polytope box(const Vec& lo, const Vec& hi) {
        Polytope p(int(lo.size()));
        for (int k = 0; k < p.dim_; ++k) {
            Vec a(p.dim_, 0.0);
            a[k] = 1.0;
            p.add_facet(a, -hi[k]);
            a[k] = -1.0;
            p.add_facet(a, lo[k]);
        }
        return p;
    }

    // {t >= 0, sum t <= 1}: the simplex Delta(J) in drop-first coordinates
    static Polytope simplex_chart_domain(int k) {
        Polytope p(k);
        for (int i = 0; i < k; ++i) {
            Vec a(k, 0.0);
            a[i] = -1.0;
            p.add_facet(a, 0.0);
        }
        p.add_facet(Vec(k, 1.0), -1.0);
        return p;
    }

    // largest signed violation, normalized by facet normal length
    double margin(const Vec& z) const {
        double worst = -kInf;
        for (const auto& f : facets_) {
            const double s = std::max(norm(f.a), 1e-300);
            worst = std::max(worst, f.eval(z) / s);
        }
        return facets_.empty() ? -kInf : worst;
    }

    bool contains(const Vec& z, double tol = 1e-9) const {
        if (dim_ == 0) return true;
        return facets_.empty() || margin(z) <= tol;
    }

    Polytope intersect(const Polytope& other) const {
        Polytope p(dim_, facets_);
        for (const auto& f : other.facets()) p.facets_.push_back(f);
        return p;
    }

    // Max-margin LP. Empty optional when the polytope is empty; margin <= 0
    // means nonempty but without full-dimensional interior.
    std::optional<FeasibleInterior> interior(double margin_cap = 1.0) const {
        if (dim_ == 0) return FeasibleInterior{margin_cap, {}};
        LinearProgram lp;
        lp.maximize = true;
        const int n = dim_ + 1;
        lp.objective.assign(n, 0.0);
        lp.objective[dim_] = 1.0;
        lp.lower.assign(n, -kInf);
        lp.upper.assign(n, kInf);
        lp.upper[dim_] = margin_cap;
        for (const auto& f : facets_) {
            Vec row(n, 0.0);
            for (int k = 0; k < dim_; ++k) row[k] = f.a[k];
            row[dim_] = std::max(norm(f.a), 1e-300);
            lp.add_row(row, Sense::LE, -f.b);
        }
        try {
            LpResult r = solve_lp(lp);
            FeasibleInterior fi;
            fi.margin = r.x[dim_];
            fi.point.assign(r.x.begin(), r.x.begin() + dim_);
            return fi;
        } catch (const LpInfeasible&) {
            return std::nullopt;
        }
    }

    bool feasible(double tol = 1e-9) const {
        auto fi = interior();
        return fi.has_value() && fi->margin >= -tol;
    }

    bool full_dimensional(double tol = 1e-9) const {
        auto fi = interior();
        return fi.has_value() && fi->margin > tol;
    }

    // Drops facets that are never tight on the feasible set.
    Polytope without_redundant(double tol = 1e-7) const {
        Polytope out(dim_);
        for (std::size_t i = 0; i < facets_.size(); ++i) {
            LinearProgram lp;
            lp.maximize = true;
            lp.objective = facets_[i].a;
            lp.lower.assign(dim_, -kInf);
            lp.upper.assign(dim_, kInf);
            for (std::size_t j = 0; j < facets_.size(); ++j)
                lp.add_row(facets_[j].a, Sense::LE, -facets_[j].b);
            try {
                LpResult r = solve_lp(lp);
                const double reach = r.value + facets_[i].b;  // max of <z,a>+b
                if (reach >= -tol * std::max(1.0, norm(facets_[i].a))) out.facets_.push_back(facets_[i]);
            } catch (const LpUnbounded&) {
                out.facets_.push_back(facets_[i]);
            } catch (const LpInfeasible&) {
                out.facets_.push_back(facets_[i]);
            }
        }
        return out;
    }

    // All vertices by d-subset enumeration of facets. Bounded polytopes only
    // (unbounded input simply yields the vertices of the pointed part).
    std::vector<Vec> vertices() const {
        std::vector<Vec> out;
        if (dim_ == 0) {
            out.push_back({});
            return out;
        }
        const int m = int(facets_.size());
        const int d = dim_;
        if (m < d) return out;
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        Mat A(d, d);
        Vec b(d), x;
        while (true) {
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) A(i, j) = facets_[idx[i]].a[j];
                b[i] = -facets_[idx[i]].b;
            }
            if (solve_square(A, b, x)) {
                const double scale = 1.0 + norm(x);
                if (margin(x) <= 1e-7 * scale) {
                    bool dup = false;
                    for (const auto& v : out) {
                        if (dist(v, x) <= 1e-8 * scale) {
                            dup = true;
                            break;
                        }
                    }
                    if (!dup) out.push_back(x);
                }
            }
            // next combination
            int k = d - 1;
            while (k >= 0 && idx[k] == m - d + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (int i = k + 1; i < d; ++i) idx[i] = idx[i - 1] + 1;
        }
        return out;
    }

    Vec centroid() const {
        auto vs = vertices();
        if (vs.empty()) throw DomainEmpty("centroid: no vertices");
        Vec c(dim_, 0.0);
        for (const auto& v : vs) axpy(c, 1.0, v);
        for (double& t : c) t /= double(vs.size());
        return c;
    }

  private:
    int dim_ = 0;
    std::vector<Halfspace> facets_;
};

// ---------------------------------------------------------------------------
// Euclidean projection onto the convex hull of a point set.
// ---------------------------------------------------------------------------

struct HullProjection {
    Vec point;    // nearest point of the hull
    Vec weights;  // convex weights over the input points (point = sum w_i p_i)
};

namespace detail {

// affine minimizer of ||sum a_i q_i||^2 with sum a_i = 1 over the subset S
inline bool affine_min_norm(const std::vector<Vec>& q, const std::vector<int>& S, Vec& a) {
    const int k = int(S.size());
    Mat M(k + 1, k + 1);
    Vec rhs(k + 1, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) M(i, j) = 2.0 * dot(q[S[i]], q[S[j]]);
        M(i, k) = 1.0;
        M(k, i) = 1.0;
    }
    rhs[k] = 1.0;
    Vec sol;
    if (!solve_square(M, rhs, sol)) {
        sol = lstsq(M, rhs);
        // verify the (possibly rank-deficient) solve actually hit the system
        for (int i = 0; i <= k; ++i) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += M(i, j) * sol[j];
            if (std::abs(s - rhs[i]) > 1e-7) return false;
        }
    }
    a.assign(sol.begin(), sol.begin() + k);
    return true;
}

inline bool hull_kkt_ok(const Vec& x, const std::vector<Vec>& q, double tol) {
    const double xx = dot(x, x);
    for (const auto& qi : q)
        if (dot(x, qi) < xx - tol) return false;
    return true;
}

// exhaustive Caratheodory search; used only when Wolfe fails to certify
inline bool hull_project_exhaustive(const std::vector<Vec>& q, int ambient_dim,
                                    Vec& x, Vec& w, double tol) {
    const int m = int(q.size());
    const int cap = std::min(m, ambient_dim + 1);
    std::vector<int> S;
    std::vector<int> idx;
    for (int size = 1; size <= cap; ++size) {
        idx.assign(size, 0);
        for (int i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            Vec a;
            if (affine_min_norm(q, idx, a)) {
                bool nonneg = true;
                for (double v : a)
                    if (v < -1e-10) nonneg = false;
                if (nonneg) {
                    Vec cand(q[0].size(), 0.0);
                    for (int i = 0; i < size; ++i) axpy(cand, std::max(a[i], 0.0), q[idx[i]]);
                    if (hull_kkt_ok(cand, q, tol)) {
                        x = cand;
                        w.assign(m, 0.0);
                        double s = 0.0;
                        for (int i = 0; i < size; ++i) s += std::max(a[i], 0.0);
                        for (int i = 0; i < size; ++i) w[idx[i]] = std::max(a[i], 0.0) / s;
                        return true;
                    }
                }
            }
            int k = size - 1;
            while (k >= 0 && idx[k] == m - size + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (int i = k + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return false;
}

}  // namespace detail

// Wolfe's min-norm-point algorithm on {p_i - Z}, certified by the
// variational inequality <Z - proj, p_i - proj> <= tol and backed by an
// exhaustive support search if the certificate fails.
inline HullProjection project_onto_hull(const Vec& Z, const std::vector<Vec>& pts) {
    if (pts.empty()) throw std::invalid_argument("project_onto_hull: empty point set");
    const int m = int(pts.size());
    const int d = int(Z.size());
    std::vector<Vec> q(m);
    double scale = 1.0;
    for (int i = 0; i < m; ++i) {
        q[i] = sub(pts[i], Z);
        scale = std::max(scale, norm2(q[i]));
    }
    const double tol = 1e-11 * scale;

    std::vector<int> S;
    Vec w;
    {
        int i0 = 0;
        double best = norm2(q[0]);
        for (int i = 1; i < m; ++i) {
            const double v = norm2(q[i]);
            if (v < best) {
                best = v;
                i0 = i;
            }
        }
        S = {i0};
        w = {1.0};
    }
    Vec x = q[S[0]];
    bool certified = false;
    for (int iter = 0; iter < 64 * (m + 2) && !certified; ++iter) {
        // most violating point
        int j = -1;
        double bestv = dot(x, x) - tol;
        for (int i = 0; i < m; ++i) {
            const double v = dot(x, q[i]);
            if (v < bestv - tol) {
                bestv = v;
                j = i;
                break;  // lowest index suffices; any violator works
            }
        }
        if (j < 0) {
            certified = true;
            break;
        }
        if (std::find(S.begin(), S.end(), j) == S.end()) {
            S.push_back(j);
            w.push_back(0.0);
        }
        // minor cycle: move to the affine minimizer, dropping points that
        // would leave the corral
        for (int minor = 0; minor < 4 * (m + 2); ++minor) {
            Vec a;
            if (!detail::affine_min_norm(q, S, a)) {
                certified = false;
                iter = 1 << 28;  // force fallback
                break;
            }
            double amin = kInf;
            for (double v : a) amin = std::min(amin, v);
            if (amin > -1e-12) {
                w = a;
                for (double& v : w) v = std::max(v, 0.0);
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < S.size(); ++i) {
                if (a[i] < w[i]) {
                    const double t = w[i] / (w[i] - a[i]);
                    theta = std::min(theta, t);
                }
            }
            std::vector<int> keepS;
            Vec keepw;
            for (std::size_t i = 0; i < S.size(); ++i) {
                const double nw = (1 - theta) * w[i] + theta * a[i];
                if (nw > 1e-12) {
                    keepS.push_back(S[i]);
                    keepw.push_back(nw);
                }
            }
            if (keepS.empty()) {
                keepS.push_back(S[0]);
                keepw.push_back(1.0);
            }
            S = keepS;
            w = keepw;
            double tot = 0.0;
            for (double v : keepw) tot += v;
            for (double& v : w) v /= tot;
        }
        x.assign(d, 0.0);
        for (std::size_t i = 0; i < S.size(); ++i) axpy(x, w[i], q[S[i]]);
    }

    if (!certified || !detail::hull_kkt_ok(x, q, 1e-9 * scale)) {
        Vec fx, fw;
        if (detail::hull_project_exhaustive(q, d, fx, fw, 1e-9 * scale)) {
            HullProjection hp;
            hp.point = add(Z, fx);
            hp.weights = fw;
            return hp;
        }
        // keep the Wolfe iterate; it is the best certified point we have
    }
    HullProjection hp;
    hp.weights.assign(m, 0.0);
    double tot = 0.0;
    for (double v : w) tot += v;
    for (std::size_t i = 0; i < S.size(); ++i) hp.weights[S[i]] = w[i] / tot;
    hp.point = add(Z, x);
    return hp;
}

// Nearest point of a (bounded, feasible) H-representation polytope.
inline Vec project_onto_polytope(const Vec& Z, const Polytope& P) {
    if (P.dim() == 0) return {};
    if (P.contains(Z, 1e-12)) return Z;
    auto vs = P.vertices();
    if (vs.empty()) {
        if (!P.feasible()) throw DomainEmpty("project_onto_polytope: infeasible polytope");
        throw DomainEmpty("project_onto_polytope: no vertices (unbounded?)");
    }
    return project_onto_hull(Z, vs).point;
}

inline double distance_to_polytope(const Vec& Z, const Polytope& P) {
    if (P.contains(Z, 0.0)) return 0.0;
    return dist(Z, project_onto_polytope(Z, P));
}

// ---------------------------------------------------------------------------
// Affine charts: low-dimensional coordinates for simplices and flag sets.
// ---------------------------------------------------------------------------

class Chart {
  public:
    enum class Kind { Identity, DropFirst, Orthonormal };

    Chart() = default;

    static Chart identity(int dim) {
        Chart c;
        c.kind_ = Kind::Identity;
        c.dim_ = dim;
        c.ambient_dim_ = dim;
        return c;
    }

    // Delta(J) -> R^{J-1}, y -> (y_1, ..., y_{J-1}) (drop first coordinate);
    // matches the usual "probability of the non-first actions" convention
    static Chart simplex(int J) {
        Chart c;
        c.kind_ = Kind::DropFirst;
        c.dim_ = J - 1;
        c.ambient_dim_ = J;
        return c;
    }

    // orthonormal basis of the affine hull of a point set
    static Chart orthonormal(const std::vector<Vec>& pts, double tol = 1e-9) {
        if (pts.empty()) throw std::invalid_argument("Chart::orthonormal: no points");
        Chart c;
        c.kind_ = Kind::Orthonormal;
        c.origin_ = pts[0];
        c.ambient_dim_ = int(pts[0].size());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            Vec v = sub(pts[i], c.origin_);
            for (const auto& b : c.basis_) axpy(v, -dot(v, b), b);
            const double n = norm(v);
            if (n > tol) {
                for (double& t : v) t /= n;
                c.basis_.push_back(std::move(v));
            }
        }
        c.dim_ = int(c.basis_.size());
        return c;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    int ambient_dim() const { return ambient_dim_; }
    const Vec& origin() const { return origin_; }
    const std::vector<Vec>& basis() const { return basis_; }

    Vec to_chart(const Vec& amb) const {
        switch (kind_) {
            case Kind::Identity:
                return amb;
            case Kind::DropFirst:
                return Vec(amb.begin() + 1, amb.end());
            case Kind::Orthonormal: {
                Vec t(dim_);
                for (int k = 0; k < dim_; ++k) t[k] = dot(basis_[k], amb) - dot(basis_[k], origin_);
                return t;
            }
        }
        return {};
    }

    Vec to_ambient(const Vec& t) const {
        switch (kind_) {
            case Kind::Identity:
                return t;
            case Kind::DropFirst: {
                Vec y(ambient_dim_, 0.0);
                double s = 0.0;
                for (int k = 0; k < dim_; ++k) {
                    y[k + 1] = t[k];
                    s += t[k];
                }
                y[0] = 1.0 - s;
                return y;
            }
            case Kind::Orthonormal: {
                Vec y = origin_;
                for (int k = 0; k < dim_; ++k) axpy(y, t[k], basis_[k]);
                return y;
            }
        }
        return {};
    }

  private:
    Kind kind_ = Kind::Identity;
    int dim_ = 0;
    int ambient_dim_ = 0;
    Vec origin_;
    std::vector<Vec> basis_;
};

// H-representation of the convex hull of chart-coordinate points, dim <= 3.
inline Polytope hull_to_hrep(const std::vector<Vec>& pts, int dim) {
    Polytope p(dim);
    if (dim == 0) return p;
    if (dim == 1) {
        double lo = kInf, hi = -kInf;
        for (const auto& v : pts) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        p.add_facet({1.0}, -hi);
        p.add_facet({-1.0}, lo);
        return p;
    }
    if (dim > 3) throw UnsupportedDimension("hull_to_hrep: dim > 3");
    const int m = int(pts.size());
    auto try_facet = [&](Vec n, const Vec& base) {
        const double nn = norm(n);
        if (nn < 1e-12) return;
        for (double& v : n) v /= nn;
        const double off = -dot(n, base);
        int above = 0, below = 0;
        for (const auto& q : pts) {
            const double s = dot(n, q) + off;
            if (s > 1e-10) ++above;
            if (s < -1e-10) ++below;
        }
        if (above > 0 && below > 0) return;
        Vec a = n;
        double b = off;
        if (above > 0) {
            for (double& v : a) v = -v;
            b = -b;
        }
        for (const auto& f : p.facets())
            if (dist(f.a, a) < 1e-9 && std::abs(f.b - b) < 1e-9) return;
        p.add_facet(a, b);
    };
    if (dim == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                Vec v = sub(pts[j], pts[i]);
                try_facet({-v[1], v[0]}, pts[i]);
            }
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k) {
                    Vec u = sub(pts[j], pts[i]), v = sub(pts[k], pts[i]);
                    Vec n = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2],
                             u[0] * v[1] - u[1] * v[0]};
                    try_facet(n, pts[i]);
                }
    }
    return p;
}

}  // namespace calib
