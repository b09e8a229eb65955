#pragma once

// Laguerre (power) diagrams: construction from an arrangement's sign
// vectors, point assignment, power slacks, the distance constant M_P of the
// slack-to-distance bound, and the neighbor relation.

#include <algorithm>
#include <optional>
#include <vector>

#include "calib/arrangement.hpp"
#include "calib/geometry.hpp"
#include "calib/linalg.hpp"

namespace calib {

struct LaguerreDiagram {
    std::vector<Vec> sites;
    Vec weights;

    int size() const { return int(sites.size()); }
    int dim() const { return sites.empty() ? 0 : int(sites[0].size()); }

    double power(int l, const Vec& z) const { return dist2(z, sites[l]) - weights[l]; }

    // argmin_l power(l, z); ties resolved to the lowest index
    int assign(const Vec& z) const {
        int best = 0;
        double bestp = power(0, z);
        for (int l = 1; l < size(); ++l) {
            const double p = power(l, z);
            if (p < bestp) {
                bestp = p;
                best = l;
            }
        }
        return best;
    }

    // max_k [power(l,z) - power(k,z)]; <= 0 iff z lies in cell l
    double power_slack(const Vec& z, int l) const {
        double worst = -kInf;
        for (int k = 0; k < size(); ++k) {
            if (k == l) continue;
            worst = std::max(worst, power(l, z) - power(k, z));
        }
        return size() == 1 ? 0.0 : worst;
    }
};

// Sites and weights of the power diagram whose cells reproduce the
// arrangement cells:
//     z(l) = (1/T) sum_t sigma_t(l) c_t
//     w(l) = ||z(l)||^2 + (2/T) sum_t sigma_t(l) b_t
// under the convention sigma_t(l) = sign(<Z,c_t> + b_t) on cell interiors.
// Adding a common constant to every weight leaves the cells unchanged.
inline LaguerreDiagram laguerre_from_signs(const std::vector<Hyperplane>& hs,
                                           const std::vector<std::vector<int>>& signs) {
    const int T = int(hs.size());
    if (T == 0) throw std::invalid_argument("laguerre_from_signs: T = 0 (single-cell case has no diagram)");
    for (std::size_t i = 0; i < signs.size(); ++i) {
        if (int(signs[i].size()) != T) throw std::invalid_argument("laguerre_from_signs: sign length != T");
        for (std::size_t j = i + 1; j < signs.size(); ++j)
            if (signs[i] == signs[j]) throw std::invalid_argument("laguerre_from_signs: duplicate sign vectors");
    }
    const int d = int(hs[0].c.size());
    LaguerreDiagram diag;
    for (const auto& sig : signs) {
        Vec z(d, 0.0);
        double bsum = 0.0;
        for (int t = 0; t < T; ++t) {
            axpy(z, double(sig[t]) / T, hs[t].c);
            bsum += double(sig[t]) * hs[t].b;
        }
        diag.weights.push_back(norm2(z) + 2.0 * bsum / T);
        diag.sites.push_back(std::move(z));
    }
    return diag;
}

// H-representation of cell l: the power bisectors against every other site,
// intersected with the domain when given. Bisector normals are kept raw
// (a = 2(z_k - z_l)) so that a power slack of eps inflates each inequality
// by exactly eps.
inline Polytope laguerre_cell(const LaguerreDiagram& diag, int l, const Polytope* domain = nullptr) {
    const int d = diag.dim();
    Polytope p = domain ? *domain : Polytope(d);
    for (int k = 0; k < diag.size(); ++k) {
        if (k == l) continue;
        Vec a = scaled(sub(diag.sites[k], diag.sites[l]), 2.0);
        const double b = norm2(diag.sites[l]) - diag.weights[l] - norm2(diag.sites[k]) + diag.weights[k];
        if (norm(a) < 1e-14) {
            if (b > 0) {  // empty cell: power(l) - power(k) = b > 0 everywhere
                Polytope empty(d);
                empty.add_facet(Vec(d, 0.0), 1.0);
                return empty;
            }
            continue;
        }
        p.add_facet(std::move(a), b);
    }
    return p;
}

namespace detail {

// max over vertices and d-subsets of active normals of sqrt(d/lambda_min);
// subsets made only of non-inflatable (domain) normals are skipped, their
// vertex perturbation being identically zero.
inline double gram_constant(const std::vector<Vec>& normals, const std::vector<bool>& inflatable,
                            const std::vector<Vec>& vertices,
                            const std::vector<double>& offsets, int d) {
    double worst = 0.0;
    const int m = int(normals.size());
    for (const auto& v : vertices) {
        std::vector<int> active;
        for (int i = 0; i < m; ++i) {
            const double s = std::max(norm(normals[i]), 1e-300);
            if (std::abs(dot(normals[i], v) + offsets[i]) <= 1e-7 * s * (1.0 + norm(v)))
                active.push_back(i);
        }
        if (int(active.size()) < d) continue;
        std::vector<int> idx(d);
        for (int i = 0; i < d; ++i) idx[i] = i;
        while (true) {
            bool any_inflatable = false;
            for (int i = 0; i < d; ++i) any_inflatable |= inflatable[active[idx[i]]];
            if (any_inflatable) {
                Mat Q(d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        Q(i, j) = dot(normals[active[idx[i]]], normals[active[idx[j]]]);
                const double lmin = smallest_eigenvalue_sym(Q);
                if (lmin > 1e-12) worst = std::max(worst, std::sqrt(double(d) / lmin));
            }
            int k = d - 1;
            while (k >= 0 && idx[k] == int(active.size()) - d + k) --k;
            if (k < 0) break;
            ++idx[k];
            for (int i = k + 1; i < d; ++i) idx[i] = idx[i - 1] + 1;
        }
    }
    return worst;
}

}  // namespace detail

// Distance constant M_P of the diagram restricted to a bounding domain:
// whenever power_slack(Z, l) <= eps (Z in the domain), dist(Z, P(l)) is at
// most M_P * eps.
inline double distance_constant(const LaguerreDiagram& diag, const Polytope& domain) {
    const int d = diag.dim();
    if (d == 0 || diag.size() == 1) return 0.0;
    double worst = 0.0;
    for (int l = 0; l < diag.size(); ++l) {
        Polytope cell = laguerre_cell(diag, l, &domain);
        if (!cell.feasible()) continue;
        auto verts = cell.vertices();
        if (verts.empty()) throw Error("distance_constant: cell without vertices");
        std::vector<Vec> normals;
        std::vector<double> offsets;
        std::vector<bool> inflatable;
        const std::size_t ndomain = domain.facets().size();
        for (std::size_t i = 0; i < cell.facets().size(); ++i) {
            normals.push_back(cell.facets()[i].a);
            offsets.push_back(cell.facets()[i].b);
            inflatable.push_back(i >= ndomain);  // bisectors only
        }
        worst = std::max(worst, detail::gram_constant(normals, inflatable, verts, offsets, d));
    }
    return worst;
}

// Complex variant: each cell is given by its own stored inequalities, all of
// which inflate under the complex calibration scores.
inline double distance_constant(const std::vector<Polytope>& cells) {
    double worst = 0.0;
    for (const auto& cell : cells) {
        if (cell.dim() == 0) continue;
        if (!cell.feasible()) continue;
        auto verts = cell.vertices();
        if (verts.empty()) throw Error("distance_constant: cell without vertices");
        std::vector<Vec> normals;
        std::vector<double> offsets;
        std::vector<bool> inflatable;
        for (const auto& f : cell.facets()) {
            normals.push_back(f.a);
            offsets.push_back(f.b);
            inflatable.push_back(true);
        }
        worst = std::max(worst, detail::gram_constant(normals, inflatable, verts, offsets, cell.dim()));
    }
    return worst;
}

// (l,k) adjacent iff the shared power-bisector face has affine dimension
// d-1, i.e. admits a point with strict slack in every other constraint.
inline std::vector<std::vector<bool>> neighbors(const LaguerreDiagram& diag, const Polytope& domain,
                                                double tol = 1e-9) {
    const int L = diag.size();
    const int d = diag.dim();
    std::vector<std::vector<bool>> adj(L, std::vector<bool>(L, false));
    if (L == 2) {
        // with two cells each is the other's neighbor whenever both exist
        adj[0][1] = adj[1][0] = true;
        return adj;
    }
    for (int l = 0; l < L; ++l) {
        for (int k = l + 1; k < L; ++k) {
            // maximize margin m subject to: power_l = power_k, every other
            // power constraint and the domain satisfied with slack m
            LinearProgram lp;
            lp.maximize = true;
            lp.objective.assign(d + 1, 0.0);
            lp.objective[d] = 1.0;
            lp.lower.assign(d + 1, -kInf);
            lp.upper.assign(d + 1, kInf);
            lp.upper[d] = 1.0;
            auto bisector = [&](int a, int bcell) {
                Vec c = scaled(sub(diag.sites[bcell], diag.sites[a]), 2.0);
                const double off = norm2(diag.sites[a]) - diag.weights[a] -
                                   norm2(diag.sites[bcell]) + diag.weights[bcell];
                return std::make_pair(c, off);
            };
            auto [ceq, beq] = bisector(l, k);
            {
                Vec row(d + 1, 0.0);
                for (int i = 0; i < d; ++i) row[i] = ceq[i];
                lp.add_row(row, Sense::EQ, -beq);
            }
            bool infeasible = false;
            for (int mm = 0; mm < L && !infeasible; ++mm) {
                if (mm == l || mm == k) continue;
                for (int side : {l, k}) {
                    auto [c, off] = bisector(side, mm);
                    const double cn = norm(c);
                    if (cn < 1e-14) {
                        if (off > 0) infeasible = true;
                        continue;
                    }
                    Vec row(d + 1, 0.0);
                    for (int i = 0; i < d; ++i) row[i] = c[i];
                    row[d] = cn;
                    lp.add_row(row, Sense::LE, -off);
                }
            }
            for (const auto& f : domain.facets()) {
                Vec row(d + 1, 0.0);
                for (int i = 0; i < d; ++i) row[i] = f.a[i];
                row[d] = std::max(norm(f.a), 1e-300);
                lp.add_row(row, Sense::LE, -f.b);
            }
            if (infeasible) continue;
            try {
                LpResult r = solve_lp(lp);
                if (r.x[d] > tol) adj[l][k] = adj[k][l] = true;
            } catch (const LpInfeasible&) {
            }
        }
    }
    return adj;
}

}  // namespace calib
