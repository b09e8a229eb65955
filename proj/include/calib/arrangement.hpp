#pragma once

// Hyperplane arrangements restricted to a bounded domain, enumerated by
// breadth-first sign-vector exploration with an LP feasibility check per
// candidate cell. Exact at desk scale (d <= 4, T <= 12).

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "calib/errors.hpp"
#include "calib/geometry.hpp"
#include "calib/rng.hpp"

namespace calib {

struct ArrangementCell {
    std::vector<int> signs;  // one +-1 per input hyperplane
    Polytope poly;           // sign halfspaces plus the domain facets
    Vec interior_point;
};

struct Arrangement {
    std::vector<Hyperplane> hyperplanes;
    Polytope domain;
    std::vector<ArrangementCell> cells;

    // index of the cell whose sign vector matches sign(<Z,c_t> + b_t), or -1
    int locate_by_signs(const Vec& z, double boundary_tol = 1e-9) const {
        std::vector<int> sig(hyperplanes.size());
        for (std::size_t t = 0; t < hyperplanes.size(); ++t) {
            const double v = hyperplanes[t].eval(z);
            if (std::abs(v) <= boundary_tol * std::max(1.0, norm(hyperplanes[t].c) * (1.0 + norm(z))))
                return -1;  // too close to a hyperplane to classify
            sig[t] = v > 0 ? 1 : -1;
        }
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].signs == sig) return int(i);
        return -1;
    }
};

namespace detail {

// groups hyperplanes that define the same set, up to scaling and orientation
struct UniqueHyperplanes {
    std::vector<Hyperplane> planes;  // representatives
    std::vector<int> group;          // input index -> representative index
    std::vector<int> orient;         // +-1: sign of input relative to representative
};

inline UniqueHyperplanes dedup_hyperplanes(const std::vector<Hyperplane>& hs, double tol = 1e-9) {
    UniqueHyperplanes u;
    std::vector<Vec> canon;  // normalized (c,b) with fixed sign
    for (const auto& h : hs) {
        Vec cb = h.c;
        cb.push_back(h.b);
        const double n = norm(cb);
        if (n < 1e-14 || norm(h.c) < 1e-14)
            throw std::invalid_argument("arrangement: hyperplane with zero normal");
        for (double& v : cb) v /= n;
        int flip = 1;
        for (double v : cb) {
            if (std::abs(v) > 1e-12) {
                flip = v > 0 ? 1 : -1;
                break;
            }
        }
        if (flip < 0)
            for (double& v : cb) v = -v;
        int found = -1;
        for (std::size_t i = 0; i < canon.size(); ++i) {
            if (dist(canon[i], cb) < tol) {
                found = int(i);
                break;
            }
        }
        if (found < 0) {
            canon.push_back(cb);
            u.planes.push_back(h);
            // store representative with the canonical orientation
            if (flip < 0) {
                for (double& v : u.planes.back().c) v = -v;
                u.planes.back().b = -u.planes.back().b;
            }
            found = int(u.planes.size()) - 1;
        }
        u.group.push_back(found);
        u.orient.push_back(flip);
    }
    return u;
}

inline Polytope cell_polytope(const std::vector<Hyperplane>& planes, const std::vector<int>& signs,
                              const Polytope& domain) {
    Polytope p = domain;
    for (std::size_t t = 0; t < planes.size(); ++t) {
        Vec a = scaled(planes[t].c, -double(signs[t]));
        p.add_facet(std::move(a), -double(signs[t]) * planes[t].b);
    }
    return p;
}

}  // namespace detail

inline Arrangement arrangement_cells(const std::vector<Hyperplane>& hyperplanes,
                                     const Polytope& domain, double tol = 1e-9) {
    auto dom_interior = domain.interior();
    if (!dom_interior.has_value() || dom_interior->margin <= tol)
        throw DomainEmpty("arrangement_cells: empty domain");

    Arrangement arr;
    arr.hyperplanes = hyperplanes;
    arr.domain = domain;

    if (hyperplanes.empty()) {
        arr.cells.push_back({{}, domain, dom_interior->point});
        return arr;
    }

    const auto uniq = detail::dedup_hyperplanes(hyperplanes);
    const int T = int(uniq.planes.size());

    std::map<std::vector<int>, int> seen;  // unique-plane sign vector -> cell index or -1
    std::vector<std::vector<int>> accepted;
    std::vector<Polytope> cell_polys;
    std::vector<Vec> cell_points;

    auto try_signs = [&](const std::vector<int>& sig) {
        auto it = seen.find(sig);
        if (it != seen.end()) return it->second;
        Polytope p = detail::cell_polytope(uniq.planes, sig, domain);
        auto fi = p.interior();
        int idx = -1;
        if (fi.has_value() && fi->margin > tol) {
            idx = int(accepted.size());
            accepted.push_back(sig);
            cell_polys.push_back(std::move(p));
            cell_points.push_back(fi->point);
        }
        seen.emplace(sig, idx);
        return idx;
    };

    auto signs_at = [&](const Vec& z) -> std::optional<std::vector<int>> {
        std::vector<int> sig(T);
        for (int t = 0; t < T; ++t) {
            const double v = uniq.planes[t].eval(z);
            if (std::abs(v) <= tol * std::max(1.0, norm(uniq.planes[t].c) * (1.0 + norm(z))))
                return std::nullopt;
            sig[t] = v > 0 ? 1 : -1;
        }
        return sig;
    };

    // seed BFS from the Chebyshev-style interior point plus random samples;
    // the sampling guards against components that single-sign flips miss
    std::vector<std::vector<int>> queue;
    if (auto s = signs_at(dom_interior->point)) {
        if (try_signs(*s) >= 0) queue.push_back(*s);
    }
    {
        Rng rng(0x9E3779B97F4A7C15ull);
        auto verts = domain.vertices();
        if (!verts.empty()) {
            Vec lo = verts[0], hi = verts[0];
            for (const auto& v : verts)
                for (int k = 0; k < domain.dim(); ++k) {
                    lo[k] = std::min(lo[k], v[k]);
                    hi[k] = std::max(hi[k], v[k]);
                }
            int found = 0;
            for (int it = 0; it < 512 && found < 64; ++it) {
                Vec z(domain.dim());
                for (int k = 0; k < domain.dim(); ++k) z[k] = rng.uniform(lo[k], hi[k]);
                if (!domain.contains(z, -tol)) continue;
                ++found;
                if (auto s = signs_at(z)) {
                    if (try_signs(*s) >= 0 &&
                        std::find(queue.begin(), queue.end(), *s) == queue.end())
                        queue.push_back(*s);
                }
            }
        }
    }

    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::vector<int> sig = queue[qi];
        for (int t = 0; t < T; ++t) {
            std::vector<int> flipped = sig;
            flipped[t] = -flipped[t];
            const bool fresh = seen.find(flipped) == seen.end();
            if (fresh && try_signs(flipped) >= 0) queue.push_back(flipped);
        }
    }

    // expand unique-plane signs back to one entry per input hyperplane
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        ArrangementCell cell;
        cell.signs.resize(hyperplanes.size());
        for (std::size_t t = 0; t < hyperplanes.size(); ++t)
            cell.signs[t] = uniq.orient[t] * accepted[i][uniq.group[t]];
        cell.poly = std::move(cell_polys[i]);
        cell.interior_point = std::move(cell_points[i]);
        arr.cells.push_back(std::move(cell));
    }
    return arr;
}

// phi(T,d) = sum_{k<=d} C(T,k): Buck's bound on the number of cells cut out
// of R^d by T hyperplanes
inline unsigned long long cell_count_bound(int T, int d) {
    if (T < 0 || d < 1) throw std::invalid_argument("cell_count_bound: T >= 0, d >= 1 required");
    if (T > 62) throw std::invalid_argument("cell_count_bound: T too large for 64-bit result");
    if (d >= T) return 1ull << T;
    unsigned long long total = 0;
    for (int k = 0; k <= d; ++k) {
        unsigned long long c = 1;
        for (int i = 0; i < k; ++i) c = c * (T - i) / (i + 1);
        total += c;
    }
    return total;
}

}  // namespace calib
