#pragma once

// Best-response polytopial complexes and their Laguerre refinements.
//
// Full monitoring: Delta(J) splits into the polytopes B^i on which a pure
// action i is a best response (duplicates merged, empty pieces dropped).
//
// Partial monitoring: the flag set F splits into finitely many polytopes on
// which one mixed action is a best response to every flag. Construction:
// solve the dualized best-response LP at sample flags, collect the optimal
// basic solutions as affine minorants of the value function, cut F by the
// pairwise equality hyperplanes of the essential minorants, and label each
// arrangement cell at its centroid. Correctness is enforced by an
// independent sampling oracle rather than by construction.

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "calib/arrangement.hpp"
#include "calib/game.hpp"
#include "calib/geometry.hpp"
#include "calib/laguerre.hpp"
#include "calib/rng.hpp"

namespace calib {

struct LabeledComplex {
    enum class Mode { FullMonitoring, PartialMonitoring };

    Mode mode = Mode::FullMonitoring;
    Chart chart;                  // chart coords <-> ambient (Delta(J) or Delta(S)^I)
    Polytope domain;              // chart coords
    std::size_t domain_facets = 0;  // leading facets of every cell replicate the domain
    std::vector<Polytope> cells;
    std::vector<Vec> actions;      // x(l), mixed action over I
    std::vector<int> pure_actions; // representative pure action (full monitoring), else -1

    int size() const { return int(cells.size()); }

    // payoff of the attached action against the chart point's ambient object
    double label_value(const FiniteGame& g, int l, const Vec& chart_point) const {
        if (mode == Mode::FullMonitoring)
            return g.rho_pure_mixed(pure_actions[l], chart.to_ambient(chart_point));
        return worst_payoff(g, actions[l], chart.to_ambient(chart_point));
    }

    double optimal_value(const FiniteGame& g, const Vec& chart_point) const {
        if (mode == Mode::FullMonitoring) {
            const Vec y = chart.to_ambient(chart_point);
            double best = -kInf;
            for (int i = 0; i < g.I; ++i) best = std::max(best, g.rho_pure_mixed(i, y));
            return best;
        }
        return best_worst(g, chart.to_ambient(chart_point)).value;
    }
};

namespace detail {

// drops cell facets (beyond the shared domain block) that are never tight
inline Polytope prune_br_facets(const Polytope& cell, std::size_t domain_facets, double tol = 1e-7) {
    Polytope out(cell.dim());
    for (std::size_t i = 0; i < domain_facets; ++i)
        out.add_facet(cell.facets()[i].a, cell.facets()[i].b);
    for (std::size_t i = domain_facets; i < cell.facets().size(); ++i) {
        LinearProgram lp;
        lp.maximize = true;
        lp.objective = cell.facets()[i].a;
        lp.lower.assign(cell.dim(), -kInf);
        lp.upper.assign(cell.dim(), kInf);
        for (const auto& f : cell.facets()) lp.add_row(f.a, Sense::LE, -f.b);
        bool keep = true;
        try {
            const double reach = solve_lp(lp).value + cell.facets()[i].b;
            keep = reach >= -tol * std::max(1.0, norm(cell.facets()[i].a));
        } catch (const Error&) {
        }
        if (keep) out.add_facet(cell.facets()[i].a, cell.facets()[i].b);
    }
    return out;
}

}  // namespace detail

// Full-monitoring best-response complex of Delta(J) in drop-first chart
// coordinates. Actions with identical payoff rows share one representative;
// actions whose best-response region has empty interior get no cell.
inline LabeledComplex full_monitoring_complex(const FiniteGame& g) {
    LabeledComplex cx;
    cx.mode = LabeledComplex::Mode::FullMonitoring;
    cx.chart = Chart::simplex(g.J);
    const int k = g.J - 1;
    cx.domain = Polytope::simplex_chart_domain(k);
    cx.domain_facets = cx.domain.facets().size();

    // rho(i, y(theta)) = const_i + <coef_i, theta>
    std::vector<Vec> coef(g.I, Vec(k, 0.0));
    Vec cnst(g.I, 0.0);
    for (int i = 0; i < g.I; ++i) {
        cnst[i] = g.payoff(i, 0);
        for (int j = 1; j < g.J; ++j) coef[i][j - 1] = g.payoff(i, j) - g.payoff(i, 0);
    }

    // merge identical payoff rows
    std::vector<int> reps;
    for (int i = 0; i < g.I; ++i) {
        bool dup = false;
        for (int r : reps) {
            double d = std::abs(cnst[i] - cnst[r]);
            for (int q = 0; q < k; ++q) d = std::max(d, std::abs(coef[i][q] - coef[r][q]));
            if (d <= 1e-9) {
                dup = true;
                break;
            }
        }
        if (!dup) reps.push_back(i);
    }

    if (k == 0) {
        // single-point domain: the complex is the argmax action alone
        int best = reps[0];
        for (int r : reps)
            if (cnst[r] > cnst[best]) best = r;
        cx.cells = {Polytope(0)};
        Vec x(g.I, 0.0);
        x[best] = 1.0;
        cx.actions = {std::move(x)};
        cx.pure_actions = {best};
        return cx;
    }

    for (int i : reps) {
        Polytope cell = cx.domain;
        for (int r : reps) {
            if (r == i) continue;
            cell.add_facet(sub(coef[r], coef[i]), cnst[r] - cnst[i]);
        }
        if (!cell.full_dimensional(1e-9)) continue;
        cx.cells.push_back(detail::prune_br_facets(cell, cx.domain_facets));
        Vec x(g.I, 0.0);
        x[i] = 1.0;
        cx.actions.push_back(std::move(x));
        cx.pure_actions.push_back(i);
    }
    return cx;
}

struct VerifyReport {
    double max_gap = 0.0;
    Vec worst_point;  // chart coords of the largest optimality gap
    int coverage_violations = 0;
    int overlap_violations = 0;
    int samples = 0;

    bool ok(double gap_tol = 1e-6) const {
        return max_gap <= gap_tol && coverage_violations == 0 && overlap_violations == 0;
    }
};

// Independent oracle: samples the domain (plus every cell vertex and
// centroid), compares each attached label's value against the optimum, and
// counts coverage / interior-overlap violations.
inline VerifyReport verify_complex(const FiniteGame& g, const LabeledComplex& cx, int n_samples,
                                   std::uint64_t seed = 0x5EEDC0DEull) {
    VerifyReport rep;
    std::vector<Vec> pts;
    if (cx.domain.dim() == 0) {
        pts.push_back({});
    } else {
        for (const auto& cell : cx.cells) {
            auto vs = cell.vertices();
            pts.insert(pts.end(), vs.begin(), vs.end());
            if (!vs.empty()) {
                Vec c(cx.domain.dim(), 0.0);
                for (const auto& v : vs) axpy(c, 1.0 / vs.size(), v);
                pts.push_back(c);
            }
        }
        auto verts = cx.domain.vertices();
        Vec lo = verts.at(0), hi = verts.at(0);
        for (const auto& v : verts)
            for (int q = 0; q < cx.domain.dim(); ++q) {
                lo[q] = std::min(lo[q], v[q]);
                hi[q] = std::max(hi[q], v[q]);
            }
        Rng rng(seed);
        int made = 0;
        for (long it = 0; it < 200L * n_samples && made < n_samples; ++it) {
            Vec z(cx.domain.dim());
            for (int q = 0; q < cx.domain.dim(); ++q) z[q] = rng.uniform(lo[q], hi[q]);
            if (!cx.domain.contains(z, 1e-12)) continue;
            pts.push_back(z);
            ++made;
        }
    }

    for (const auto& z : pts) {
        ++rep.samples;
        int containing = 0, strictly = 0;
        double opt = 0.0;
        bool opt_done = false;
        for (int l = 0; l < cx.size(); ++l) {
            if (!cx.cells[l].contains(z, 1e-9)) continue;
            ++containing;
            if (cx.cells[l].dim() > 0 && cx.cells[l].margin(z) < -1e-9) ++strictly;
            if (!opt_done) {
                opt = cx.optimal_value(g, z);
                opt_done = true;
            }
            const double gap = opt - cx.label_value(g, l, z);
            if (gap > rep.max_gap) {
                rep.max_gap = gap;
                rep.worst_point = z;
            }
        }
        if (containing == 0) ++rep.coverage_violations;
        if (strictly > 1) ++rep.overlap_violations;
    }
    return rep;
}

// Partial-monitoring best-response complex over the flag set F, in an
// orthonormal chart of its affine hull. Throws UnsupportedDimension when F
// has affine dimension above 3.
inline LabeledComplex partial_monitoring_complex(const FiniteGame& g) {
    LabeledComplex cx;
    cx.mode = LabeledComplex::Mode::PartialMonitoring;
    const FlagSet fs = flag_set(g);
    cx.chart = Chart::orthonormal(fs.vertex_flags);
    const int k = cx.chart.dim();
    if (k > 3) throw UnsupportedDimension("partial_monitoring_complex: dim(F) > 3");

    if (k == 0) {
        cx.domain = Polytope(0);
        cx.cells = {Polytope(0)};
        cx.actions = {best_worst(g, fs.vertex_flags[0]).x};
        cx.pure_actions = {-1};
        cx.domain_facets = 0;
        return cx;
    }

    std::vector<Vec> chart_pts;
    for (const auto& f : fs.vertex_flags) chart_pts.push_back(cx.chart.to_chart(f));
    cx.domain = hull_to_hrep(chart_pts, k);
    cx.domain_facets = cx.domain.facets().size();

    // sample points: flag-set vertices, pairwise midpoints, random interior
    std::vector<Vec> samples = chart_pts;
    for (std::size_t i = 0; i < chart_pts.size(); ++i)
        for (std::size_t j = i + 1; j < chart_pts.size(); ++j)
            samples.push_back(scaled(add(chart_pts[i], chart_pts[j]), 0.5));
    {
        Vec lo = chart_pts[0], hi = chart_pts[0];
        for (const auto& v : chart_pts)
            for (int q = 0; q < k; ++q) {
                lo[q] = std::min(lo[q], v[q]);
                hi[q] = std::max(hi[q], v[q]);
            }
        Rng rng(0xB0C4D5ull);
        const int want = 60 * k;
        int made = 0;
        for (int it = 0; it < 200 * want && made < want; ++it) {
            Vec z(k);
            for (int q = 0; q < k; ++q) z[q] = rng.uniform(lo[q], hi[q]);
            if (!cx.domain.contains(z, 0.0)) continue;
            samples.push_back(z);
            ++made;
        }
    }

    // affine minorants a(theta) = <w,theta> + c of the value function, from
    // optimal (x, mu, nu) vertices of the dualized LP
    struct Minorant {
        Vec w;
        double c;
        Vec x;
    };
    std::vector<Minorant> minorants;
    auto add_minorant = [&](const BestWorstDual& bw) {
        Minorant m;
        m.w.assign(k, 0.0);
        for (int q = 0; q < k; ++q) m.w[q] = dot(bw.mu, cx.chart.basis()[q]);
        m.c = dot(bw.mu, cx.chart.origin()) + bw.nu;
        m.x = bw.x;
        for (const auto& o : minorants) {
            double d = std::abs(m.c - o.c);
            for (int q = 0; q < k; ++q) d = std::max(d, std::abs(m.w[q] - o.w[q]));
            if (d <= 1e-9) return;
        }
        minorants.push_back(std::move(m));
    };
    for (const auto& z : samples) add_minorant(best_worst_dual(g, cx.chart.to_ambient(z)));

    auto build = [&](bool essential_only) {
        // keep minorants that are strictly maximal somewhere on the domain
        std::vector<int> kept;
        for (std::size_t v = 0; v < minorants.size(); ++v) {
            if (!essential_only) {
                kept.push_back(int(v));
                continue;
            }
            LinearProgram lp;
            lp.maximize = true;
            lp.objective.assign(k + 1, 0.0);
            lp.objective[k] = 1.0;
            lp.lower.assign(k + 1, -kInf);
            lp.upper.assign(k + 1, kInf);
            lp.upper[k] = 1.0;
            for (std::size_t u = 0; u < minorants.size(); ++u) {
                if (u == v) continue;
                Vec row(k + 1, 0.0);
                for (int q = 0; q < k; ++q) row[q] = minorants[u].w[q] - minorants[v].w[q];
                row[k] = 1.0;
                lp.add_row(row, Sense::LE, minorants[v].c - minorants[u].c);
            }
            for (const auto& f : cx.domain.facets()) {
                Vec row(k + 1, 0.0);
                for (int q = 0; q < k; ++q) row[q] = f.a[q];
                lp.add_row(row, Sense::LE, -f.b);
            }
            try {
                if (solve_lp(lp).x[k] > 1e-9) kept.push_back(int(v));
            } catch (const LpInfeasible&) {
            }
        }

        std::vector<Hyperplane> cuts;
        for (std::size_t a = 0; a < kept.size(); ++a) {
            for (std::size_t b = a + 1; b < kept.size(); ++b) {
                const Minorant &mv = minorants[kept[a]], &mu = minorants[kept[b]];
                Hyperplane h{sub(mv.w, mu.w), mv.c - mu.c};
                if (norm(h.c) < 1e-10) continue;
                cuts.push_back(std::move(h));
            }
        }

        cx.cells.clear();
        cx.actions.clear();
        cx.pure_actions.clear();
        auto arr = arrangement_cells(cuts, cx.domain);
        for (const auto& cell : arr.cells) {
            Polytope pruned = detail::prune_br_facets(cell.poly, cx.domain_facets);
            Vec centroid(k, 0.0);
            auto vs = pruned.vertices();
            for (const auto& vtx : vs) axpy(centroid, 1.0 / vs.size(), vtx);
            Vec x = best_worst(g, cx.chart.to_ambient(centroid)).x;
            // identify labels that agree within 1e-9 (the intrinsic set X)
            for (const auto& prev : cx.actions) {
                double d = 0.0;
                for (int i = 0; i < g.I; ++i) d = std::max(d, std::abs(prev[i] - x[i]));
                if (d <= 1e-9) {
                    x = prev;
                    break;
                }
            }
            cx.cells.push_back(std::move(pruned));
            cx.actions.push_back(std::move(x));
            cx.pure_actions.push_back(-1);
        }
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
        build(attempt == 0);
        VerifyReport rep = verify_complex(g, cx, 400, 0x5EEDull + attempt);
        if (rep.ok(1e-6)) return cx;
    }
    throw Error("partial_monitoring_complex: oracle verification failed");
}

// ---------------------------------------------------------------------------
// Laguerre refinement
// ---------------------------------------------------------------------------

struct RefinedDiagram {
    Chart chart;
    Polytope domain;
    std::vector<Hyperplane> hyperplanes;  // deduplicated, jointly normalized
    std::vector<std::vector<int>> cell_signs;
    std::optional<LaguerreDiagram> diagram;  // absent iff no hyperplanes
    std::vector<Polytope> cells;             // per type, clipped to the domain
    std::vector<Vec> actions;                // x(l) per type
    std::vector<int> pure_actions;
    double bc_norm = 0.0;  // sup ||c_t|| + sup |b_t| after normalization

    int size() const { return int(actions.size()); }

    int assign(const Vec& chart_point) const {
        return diagram ? diagram->assign(chart_point) : 0;
    }
};

// Collects the cells' defining hyperplanes, normalizes them jointly so that
// sup||c|| + sup|b| = 1, rebuilds the arrangement of the domain and carries
// each parent cell's label onto the refinement.
inline RefinedDiagram refine_to_laguerre(const LabeledComplex& cx) {
    RefinedDiagram rd;
    rd.chart = cx.chart;
    rd.domain = cx.domain;

    std::vector<Hyperplane> cuts;
    for (const auto& cell : cx.cells) {
        for (std::size_t i = cx.domain_facets; i < cell.facets().size(); ++i) {
            Hyperplane h{cell.facets()[i].a, cell.facets()[i].b};
            // canonical orientation for dedup
            Vec cb = h.c;
            cb.push_back(h.b);
            const double n = norm(cb);
            if (n < 1e-13) continue;
            for (double& v : cb) v /= n;
            int flip = 1;
            for (double v : cb)
                if (std::abs(v) > 1e-12) {
                    flip = v > 0 ? 1 : -1;
                    break;
                }
            if (flip < 0)
                for (double& v : cb) v = -v;
            bool dup = false;
            for (const auto& e : cuts) {
                Vec ecb = e.c;
                ecb.push_back(e.b);
                const double en = norm(ecb);
                for (double& v : ecb) v /= en;
                int eflip = 1;
                for (double v : ecb)
                    if (std::abs(v) > 1e-12) {
                        eflip = v > 0 ? 1 : -1;
                        break;
                    }
                if (eflip < 0)
                    for (double& v : ecb) v = -v;
                if (dist(ecb, cb) < 1e-9) {
                    dup = true;
                    break;
                }
            }
            if (!dup) {
                Hyperplane canon;
                canon.c.assign(cb.begin(), cb.end() - 1);
                canon.b = cb.back();
                cuts.push_back(std::move(canon));
            }
        }
    }

    // joint scaling: sup||c_t|| + sup|b_t| = 1 (the paper's convention)
    if (!cuts.empty()) {
        double supc = 0.0, supb = 0.0;
        for (const auto& h : cuts) {
            supc = std::max(supc, norm(h.c));
            supb = std::max(supb, std::abs(h.b));
        }
        const double gamma = 1.0 / (supc + supb);
        for (auto& h : cuts) {
            for (double& v : h.c) v *= gamma;
            h.b *= gamma;
        }
        rd.bc_norm = 1.0;
    }
    rd.hyperplanes = cuts;

    if (cuts.empty()) {
        rd.cells = cx.cells.empty() ? std::vector<Polytope>{cx.domain} : cx.cells;
        rd.cell_signs = {{}};
        rd.actions = {cx.actions.at(0)};
        rd.pure_actions = {cx.pure_actions.at(0)};
        return rd;
    }

    auto arr = arrangement_cells(cuts, cx.domain);
    for (const auto& cell : arr.cells) {
        int parent = -1;
        for (int l = 0; l < cx.size(); ++l) {
            if (cx.cells[l].contains(cell.interior_point, 1e-9)) {
                parent = l;
                break;
            }
        }
        if (parent < 0) throw Error("refine_to_laguerre: refinement cell without parent");
        rd.cell_signs.push_back(cell.signs);
        rd.cells.push_back(cell.poly);
        rd.actions.push_back(cx.actions[parent]);
        rd.pure_actions.push_back(cx.pure_actions[parent]);
    }
    rd.diagram = laguerre_from_signs(cuts, rd.cell_signs);
    return rd;
}

// ---------------------------------------------------------------------------
// JSON (diagram + labels) import/export
// ---------------------------------------------------------------------------

inline nlohmann::json refined_to_json(const RefinedDiagram& rd) {
    nlohmann::json j;
    auto hps = nlohmann::json::array();
    for (const auto& h : rd.hyperplanes) hps.push_back({{"c", h.c}, {"b", h.b}});
    j["hyperplanes"] = hps;
    j["cells"] = rd.cell_signs;
    if (rd.diagram) {
        j["sites"] = rd.diagram->sites;
        j["weights"] = rd.diagram->weights;
    } else {
        j["sites"] = nlohmann::json::array();
        j["weights"] = nlohmann::json::array();
    }
    j["labels"] = rd.actions;
    return j;
}

inline RefinedDiagram refined_from_json(const nlohmann::json& j) {
    RefinedDiagram rd;
    try {
        for (const auto& h : j.at("hyperplanes"))
            rd.hyperplanes.push_back({h.at("c").get<Vec>(), h.at("b").get<double>()});
        rd.cell_signs = j.at("cells").get<std::vector<std::vector<int>>>();
        rd.actions = j.at("labels").get<std::vector<Vec>>();
        rd.pure_actions.assign(rd.actions.size(), -1);
        if (!rd.hyperplanes.empty()) {
            rd.diagram = laguerre_from_signs(rd.hyperplanes, rd.cell_signs);
            const auto sites = j.at("sites").get<std::vector<Vec>>();
            const auto weights = j.at("weights").get<Vec>();
            if (sites != rd.diagram->sites || weights != rd.diagram->weights)
                throw ValidationError("diagram json: sites/weights inconsistent with hyperplanes");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("diagram json: ") + e.what());
    }
    return rd;
}

}  // namespace calib
