#pragma once

// Dense two-phase primal simplex with Bland's anti-cycling rule.
// Deterministic, no external dependencies; sized for desk-scale programs
// (tens of variables and constraints).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "calib/errors.hpp"
#include "calib/linalg.hpp"

namespace calib {

enum class Sense { LE, EQ, GE };

struct LinearProgram {
    bool maximize = false;
    Vec objective;          // length n
    std::vector<Vec> rows;  // each length n
    std::vector<Sense> senses;
    Vec rhs;
    Vec lower;  // optional; empty means all 0
    Vec upper;  // optional; empty means all +inf

    int num_vars() const { return int(objective.size()); }

    void add_row(const Vec& a, Sense s, double b) {
        rows.push_back(a);
        senses.push_back(s);
        rhs.push_back(b);
    }
};

struct LpResult {
    double value = 0.0;
    Vec x;
};

namespace detail {

struct Tableau {
    int m = 0, n = 0;        // rows, structural+slack columns (no rhs)
    std::vector<Vec> a;      // m rows of length n
    Vec b;                   // rhs, length m
    std::vector<int> basis;  // basic column per row

    static constexpr double kPivEps = 1e-9;

    // reduced-cost row for cost vector c (length n); basis columns are unit
    Vec reduced_costs(const Vec& c) const {
        Vec r = c;
        for (int i = 0; i < m; ++i) {
            const double cb = c[basis[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < n; ++j) r[j] -= cb * a[i][j];
        }
        return r;
    }

    void pivot(int row, int col) {
        const double p = a[row][col];
        for (int j = 0; j < n; ++j) a[row][j] /= p;
        b[row] /= p;
        a[row][col] = 1.0;  // kill roundoff on the pivot itself
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = a[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) a[i][j] -= f * a[row][j];
            a[i][col] = 0.0;
            b[i] -= f * b[row];
            if (b[i] < 0 && b[i] > -1e-12) b[i] = 0.0;
        }
        basis[row] = col;
    }

    // Bland: entering = lowest index with negative reduced cost; leaving =
    // min ratio, ties broken by lowest basic index. Returns false at optimum.
    // Throws LpUnbounded when an improving ray exists.
    bool step(const Vec& c, const std::vector<bool>& allowed) {
        const Vec r = reduced_costs(c);
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (!allowed[j]) continue;
            if (r[j] < -1e-9) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return false;
        int leave = -1;
        double best = kInf;
        for (int i = 0; i < m; ++i) {
            if (a[i][enter] > kPivEps) {
                const double ratio = b[i] / a[i][enter];
                if (ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
        }
        if (leave < 0) throw LpUnbounded("lp: unbounded");
        pivot(leave, enter);
        return true;
    }

    void run(const Vec& c, const std::vector<bool>& allowed) {
        for (long iter = 0; iter < 200000; ++iter) {
            if (!step(c, allowed)) return;
        }
        throw Error("lp: iteration limit exceeded");
    }
};

}  // namespace detail

// Solves the program; throws LpInfeasible / LpUnbounded.
inline LpResult solve_lp(const LinearProgram& lp) {
    const int n0 = lp.num_vars();
    const int m0 = int(lp.rows.size());
    for (int i = 0; i < m0; ++i)
        if (int(lp.rows[i].size()) != n0) throw std::invalid_argument("lp: row size mismatch");

    Vec lower = lp.lower.empty() ? Vec(n0, 0.0) : lp.lower;
    Vec upper = lp.upper.empty() ? Vec(n0, kInf) : lp.upper;
    if (int(lower.size()) != n0 || int(upper.size()) != n0)
        throw std::invalid_argument("lp: bound size mismatch");

    // Column transforms to nonnegative standard variables:
    //   kind 0: x = lo + u            (lo finite)
    //   kind 1: x = hi - u            (lo = -inf, hi finite)
    //   kind 2: x = u_pos - u_neg     (both infinite)
    struct Col {
        int kind;
        double shift;  // lo or hi
        int u0, u1;    // standard column indices
    };
    std::vector<Col> colmap(n0);
    int nu = 0;
    for (int j = 0; j < n0; ++j) {
        if (std::isfinite(lower[j])) {
            colmap[j] = {0, lower[j], nu++, -1};
        } else if (std::isfinite(upper[j])) {
            colmap[j] = {1, upper[j], nu++, -1};
        } else {
            colmap[j] = {2, 0.0, nu, nu + 1};
            nu += 2;
        }
    }

    // Assemble rows in standard variables, including upper-bound rows.
    std::vector<Vec> rows;
    std::vector<Sense> senses;
    Vec rhs;
    auto push_row = [&](const Vec& arow, Sense s, double b) {
        Vec r(nu, 0.0);
        double shift_total = 0.0;
        for (int j = 0; j < n0; ++j) {
            const double v = arow[j];
            if (v == 0.0) continue;
            const Col& c = colmap[j];
            if (c.kind == 0) {
                r[c.u0] += v;
                shift_total += v * c.shift;
            } else if (c.kind == 1) {
                r[c.u0] -= v;
                shift_total += v * c.shift;
            } else {
                r[c.u0] += v;
                r[c.u1] -= v;
            }
        }
        rows.push_back(std::move(r));
        senses.push_back(s);
        rhs.push_back(b - shift_total);
    };
    for (int i = 0; i < m0; ++i) push_row(lp.rows[i], lp.senses[i], lp.rhs[i]);
    for (int j = 0; j < n0; ++j) {
        if (colmap[j].kind == 0 && std::isfinite(upper[j])) {
            Vec e(n0, 0.0);
            e[j] = 1.0;
            push_row(e, Sense::LE, upper[j]);
        }
        // kind 1 with finite lower cannot happen (kind 0 took it)
    }

    const int m = int(rows.size());

    // Row scaling keeps tolerances meaningful for large-coordinate data.
    for (int i = 0; i < m; ++i) {
        double s = max_abs(rows[i]);
        if (s > 1.0) {
            for (double& v : rows[i]) v /= s;
            rhs[i] /= s;
        }
        if (rhs[i] < 0) {
            for (double& v : rows[i]) v = -v;
            rhs[i] = -rhs[i];
            senses[i] = senses[i] == Sense::LE   ? Sense::GE
                        : senses[i] == Sense::GE ? Sense::LE
                                                 : Sense::EQ;
        }
    }

    // slack / surplus / artificial layout
    int n_slack = 0;
    for (Sense s : senses)
        if (s != Sense::EQ) ++n_slack;
    int n_art = 0;
    for (Sense s : senses)
        if (s != Sense::LE) ++n_art;

    detail::Tableau t;
    t.m = m;
    t.n = nu + n_slack + n_art;
    t.a.assign(m, Vec(t.n, 0.0));
    t.b = rhs;
    t.basis.assign(m, -1);
    int slack_at = nu, art_at = nu + n_slack;
    const int art_begin = art_at;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < nu; ++j) t.a[i][j] = rows[i][j];
        if (senses[i] == Sense::LE) {
            t.a[i][slack_at] = 1.0;
            t.basis[i] = slack_at++;
        } else if (senses[i] == Sense::GE) {
            t.a[i][slack_at++] = -1.0;
            t.a[i][art_at] = 1.0;
            t.basis[i] = art_at++;
        } else {
            t.a[i][art_at] = 1.0;
            t.basis[i] = art_at++;
        }
    }

    std::vector<bool> allow_all(t.n, true);
    std::vector<bool> allow_no_art(t.n, true);
    for (int j = art_begin; j < t.n; ++j) allow_no_art[j] = false;

    // Phase 1
    if (n_art > 0) {
        Vec c1(t.n, 0.0);
        for (int j = art_begin; j < t.n; ++j) c1[j] = 1.0;
        t.run(c1, allow_all);
        double art_sum = 0.0;
        for (int i = 0; i < m; ++i)
            if (t.basis[i] >= art_begin) art_sum += t.b[i];
        if (art_sum > 1e-7) throw LpInfeasible("lp: infeasible");
        // pivot remaining artificials out of the basis where possible
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < art_begin) continue;
            int col = -1;
            for (int j = 0; j < art_begin; ++j) {
                if (std::abs(t.a[i][j]) > 1e-7) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                t.pivot(i, col);
            } else {
                // redundant row: zero it so the lingering artificial is inert
                std::fill(t.a[i].begin(), t.a[i].end(), 0.0);
                t.a[i][t.basis[i]] = 1.0;
                t.b[i] = 0.0;
            }
        }
    }

    // Phase 2 on the original objective (artificials barred from entering)
    Vec c2(t.n, 0.0);
    {
        const double sign = lp.maximize ? -1.0 : 1.0;
        double cscale = std::max(1.0, max_abs(lp.objective));
        for (int j = 0; j < n0; ++j) {
            const double v = sign * lp.objective[j] / cscale;
            if (v == 0.0) continue;
            const Col& c = colmap[j];
            if (c.kind == 0) {
                c2[c.u0] += v;
            } else if (c.kind == 1) {
                c2[c.u0] -= v;
            } else {
                c2[c.u0] += v;
                c2[c.u1] -= v;
            }
        }
    }
    t.run(c2, allow_no_art);

    // recover x in original variables
    Vec u(t.n, 0.0);
    for (int i = 0; i < m; ++i) u[t.basis[i]] = t.b[i];
    LpResult res;
    res.x.assign(n0, 0.0);
    for (int j = 0; j < n0; ++j) {
        const Col& c = colmap[j];
        if (c.kind == 0)
            res.x[j] = c.shift + u[c.u0];
        else if (c.kind == 1)
            res.x[j] = c.shift - u[c.u0];
        else
            res.x[j] = u[c.u0] - u[c.u1];
    }
    res.value = dot(lp.objective, res.x);
    return res;
}

}  // namespace calib
