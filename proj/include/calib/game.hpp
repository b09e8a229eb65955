#pragma once

// Finite games with signal structures: flags, the worst-case payoff
//     W(x,f) = inf { rho(x,y) : y in Delta(J), s(y) = f },
// best responses under partial monitoring, and the built-in example games.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "calib/errors.hpp"
#include "calib/geometry.hpp"
#include "calib/linalg.hpp"
#include "calib/lp.hpp"
#include "calib/rng.hpp"

namespace calib {

using Flag = Vec;  // Delta(S)^I flattened row-major: f[i*S + s]

struct FiniteGame {
    int I = 0, J = 0, S = 0;
    Mat payoff;                            // I x J
    std::vector<std::vector<Vec>> signal;  // [i][j] -> probability vector over S

    double max_abs_payoff() const { return payoff.max_abs(); }

    double rho(int i, int j) const { return payoff(i, j); }

    double rho(const Vec& x, const Vec& y) const {
        double s = 0.0;
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j) s += x[i] * y[j] * payoff(i, j);
        return s;
    }

    double rho_pure_mixed(int i, const Vec& y) const {
        double s = 0.0;
        for (int j = 0; j < J; ++j) s += y[j] * payoff(i, j);
        return s;
    }

    // signal law independent of the decision maker's own action
    bool outcome_dependent_only(double tol = 1e-12) const {
        for (int i = 1; i < I; ++i)
            for (int j = 0; j < J; ++j)
                for (int s = 0; s < S; ++s)
                    if (std::abs(signal[i][j][s] - signal[0][j][s]) > tol) return false;
        return true;
    }

    // signals identify the pure outcome (distinct distributions per column)
    bool fully_revealing(double tol = 1e-9) const {
        for (int j = 0; j < J; ++j)
            for (int k = j + 1; k < J; ++k) {
                double d = 0.0;
                for (int i = 0; i < I; ++i)
                    for (int s = 0; s < S; ++s) d += std::abs(signal[i][j][s] - signal[i][k][s]);
                if (d <= tol) return false;
            }
        return true;
    }

    void validate() const {
        if (I < 1 || J < 1 || S < 1) throw ValidationError("game: I, J, S must be positive");
        if (payoff.rows != I || payoff.cols != J) throw ValidationError("game: payoff shape mismatch");
        if (int(signal.size()) != I) throw ValidationError("game: signal shape mismatch");
        for (int i = 0; i < I; ++i) {
            if (int(signal[i].size()) != J) throw ValidationError("game: signal shape mismatch");
            for (int j = 0; j < J; ++j) {
                if (int(signal[i][j].size()) != S) throw ValidationError("game: signal shape mismatch");
                double sum = 0.0;
                for (double v : signal[i][j]) {
                    if (v < 0.0) throw ValidationError("game: negative signal probability");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("game: signal row does not sum to 1");
            }
        }
    }
};

inline bool is_probability_vector(const Vec& x, double tol = 1e-12) {
    double s = 0.0;
    for (double v : x) {
        if (v < -tol) return false;
        s += v;
    }
    return std::abs(s - 1.0) <= tol;
}

// s(y) = (E_y[s(i,j)])_i, linear in y
inline Flag flag_of(const FiniteGame& g, const Vec& y) {
    Flag f(std::size_t(g.I) * g.S, 0.0);
    for (int i = 0; i < g.I; ++i)
        for (int j = 0; j < g.J; ++j) {
            if (y[j] == 0.0) continue;
            for (int s = 0; s < g.S; ++s) f[std::size_t(i) * g.S + s] += y[j] * g.signal[i][j][s];
        }
    return f;
}

inline Flag flag_of_pure(const FiniteGame& g, int j) {
    Vec y(g.J, 0.0);
    y[j] = 1.0;
    return flag_of(g, y);
}

// V-representation of F, the range of the flag map
struct FlagSet {
    std::vector<Flag> vertex_flags;  // flag_of(delta_j), j = 0..J-1
};

inline FlagSet flag_set(const FiniteGame& g) {
    FlagSet fs;
    for (int j = 0; j < g.J; ++j) fs.vertex_flags.push_back(flag_of_pure(g, j));
    return fs;
}

struct ProjectedFlag {
    Flag flag;    // nearest point of F, expressed exactly as a mix of vertex flags
    Vec weights;  // convex weights over pure outcomes
};

// Euclidean projection onto F = conv{ flag(delta_j) }
inline ProjectedFlag project_flag(const FiniteGame& g, const Flag& f) {
    const FlagSet fs = flag_set(g);
    auto hp = project_onto_hull(f, fs.vertex_flags);
    ProjectedFlag out;
    out.weights = hp.weights;
    out.flag.assign(f.size(), 0.0);
    for (int j = 0; j < g.J; ++j) axpy(out.flag, hp.weights[j], fs.vertex_flags[j]);
    return out;
}

// W(x,f): the least payoff among opponent mixtures generating f (after
// projecting f onto F, per the convention W(x,f) = W(x, Pi_F(f)))
inline double worst_payoff(const FiniteGame& g, const Vec& x, const Flag& f) {
    const ProjectedFlag pf = project_flag(g, f);
    LinearProgram lp;
    lp.objective.assign(g.J, 0.0);
    for (int j = 0; j < g.J; ++j)
        for (int i = 0; i < g.I; ++i) lp.objective[j] += x[i] * g.payoff(i, j);
    for (int i = 0; i < g.I; ++i)
        for (int s = 0; s < g.S; ++s) {
            Vec row(g.J, 0.0);
            for (int j = 0; j < g.J; ++j) row[j] = g.signal[i][j][s];
            lp.add_row(row, Sense::EQ, pf.flag[std::size_t(i) * g.S + s]);
        }
    lp.add_row(Vec(g.J, 1.0), Sense::EQ, 1.0);
    try {
        return solve_lp(lp).value;
    } catch (const LpInfeasible&) {
        throw Error("worst_payoff: numerically empty preimage after projection");
    }
}

struct BestWorst {
    double value = 0.0;
    Vec x;
};

// best_worst plus the optimal dual (mu, nu) of the inner minimization; the
// affine map f -> <mu,f> + nu minorizes the value function and touches it
// at the queried flag.
struct BestWorstDual {
    double value = 0.0;
    Vec x;
    Vec mu;  // length I*S
    double nu = 0.0;
};

// max_x W(x,f) in a single LP: the inner minimization over the preimage
// polytope is dualized, leaving a jointly linear program over
// (x, mu, nu) with constraints  M^T mu + nu <= rho^T x  per column j.
inline BestWorstDual best_worst_dual(const FiniteGame& g, const Flag& f) {
    const ProjectedFlag pf = project_flag(g, f);
    const int IS = g.I * g.S;
    const int n = g.I + IS + 1;  // x, mu, nu
    LinearProgram lp;
    lp.maximize = true;
    lp.objective.assign(n, 0.0);
    for (int k = 0; k < IS; ++k) lp.objective[g.I + k] = pf.flag[k];
    lp.objective[g.I + IS] = 1.0;
    lp.lower.assign(n, -kInf);
    lp.upper.assign(n, kInf);
    for (int i = 0; i < g.I; ++i) lp.lower[i] = 0.0;
    for (int j = 0; j < g.J; ++j) {
        Vec row(n, 0.0);
        for (int i = 0; i < g.I; ++i) row[i] = -g.payoff(i, j);
        for (int i = 0; i < g.I; ++i)
            for (int s = 0; s < g.S; ++s) row[g.I + i * g.S + s] = g.signal[i][j][s];
        row[g.I + IS] = 1.0;
        lp.add_row(row, Sense::LE, 0.0);
    }
    {
        Vec row(n, 0.0);
        for (int i = 0; i < g.I; ++i) row[i] = 1.0;
        lp.add_row(row, Sense::EQ, 1.0);
    }
    LpResult r = solve_lp(lp);
    BestWorstDual bw;
    bw.value = r.value;
    bw.x.assign(r.x.begin(), r.x.begin() + g.I);
    bw.mu.assign(r.x.begin() + g.I, r.x.begin() + g.I + IS);
    bw.nu = r.x[g.I + IS];
    // clean tiny simplex violations from the solver
    double sum = 0.0;
    for (double& v : bw.x) {
        v = std::max(v, 0.0);
        sum += v;
    }
    for (double& v : bw.x) v /= sum;
    return bw;
}

inline BestWorst best_worst(const FiniteGame& g, const Flag& f) {
    BestWorstDual d = best_worst_dual(g, f);
    return {d.value, std::move(d.x)};
}

// ---------------------------------------------------------------------------
// Built-in games
// ---------------------------------------------------------------------------

inline FiniteGame builtin(const std::string& name) {
    FiniteGame g;
    if (name == "matching_pennies") {
        g.I = g.J = g.S = 2;
        g.payoff = Mat(2, 2);
        g.payoff(0, 0) = 1;
        g.payoff(0, 1) = -1;
        g.payoff(1, 0) = -1;
        g.payoff(1, 1) = 1;
        g.signal.assign(2, std::vector<Vec>(2));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Vec s(2, 0.0);
                s[j] = 1.0;  // fully revealing: the signal is the outcome
                g.signal[i][j] = s;
            }
    } else if (name == "matching_pennies_dark") {
        g.I = g.J = 2;
        g.S = 1;
        g.payoff = Mat(2, 2);
        g.payoff(0, 0) = 1;
        g.payoff(0, 1) = -1;
        g.payoff(1, 0) = -1;
        g.payoff(1, 1) = 1;
        g.signal.assign(2, std::vector<Vec>(2, Vec{1.0}));  // constant signal law
    } else if (name == "label_efficient") {
        // rows: o (observe), g, b; columns: G, B
        g.I = 3;
        g.J = 2;
        g.S = 2;
        g.payoff = Mat(3, 2);
        g.payoff(0, 0) = 0;
        g.payoff(0, 1) = 0;
        g.payoff(1, 0) = 0;
        g.payoff(1, 1) = 1;
        g.payoff(2, 0) = 1;
        g.payoff(2, 1) = 0;
        const Vec a = {0.9, 0.1}, b = {0.1, 0.9}, c = {0.5, 0.5};
        g.signal.assign(3, std::vector<Vec>(2));
        g.signal[0][0] = a;
        g.signal[0][1] = b;
        g.signal[1][0] = c;
        g.signal[1][1] = c;
        g.signal[2][0] = c;
        g.signal[2][1] = c;
    } else {
        throw UnknownGame("builtin: unknown game '" + name + "'");
    }
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// JSON game format: {"I":…, "J":…, "S":…, "payoff":[[…]], "signal":[[[…]]]}
// ---------------------------------------------------------------------------

inline nlohmann::json game_to_json(const FiniteGame& g) {
    nlohmann::json j;
    j["I"] = g.I;
    j["J"] = g.J;
    j["S"] = g.S;
    auto payoff = nlohmann::json::array();
    for (int i = 0; i < g.I; ++i) payoff.push_back(g.payoff.row(i));
    j["payoff"] = payoff;
    j["signal"] = g.signal;
    return j;
}

inline FiniteGame game_from_json(const nlohmann::json& j) {
    FiniteGame g;
    try {
        g.I = j.at("I").get<int>();
        g.J = j.at("J").get<int>();
        g.S = j.at("S").get<int>();
        const auto& payoff = j.at("payoff");
        g.payoff = Mat(g.I, g.J);
        for (int i = 0; i < g.I; ++i)
            for (int jj = 0; jj < g.J; ++jj) g.payoff(i, jj) = payoff.at(i).at(jj).get<double>();
        g.signal = j.at("signal").get<std::vector<std::vector<Vec>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("game json: ") + e.what());
    }
    g.validate();
    return g;
}

// Numerical estimate of the Lipschitz constant of W in the flag argument:
// max finite-difference slope over random flag pairs of the value function
// and of W(x, .) at a random x per pair. Deterministic (fixed seed).
inline double estimate_lipschitz_W(const FiniteGame& g, int pairs = 10000) {
    Rng rng(0xC0FFEEull);
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        Vec y1 = rng.simplex_point(g.J);
        Vec y2 = rng.simplex_point(g.J);
        if (p % 2 == 1) {  // nearby pairs probe local slopes
            for (int j = 0; j < g.J; ++j) y2[j] = y1[j] + 0.05 * (y2[j] - y1[j]);
        }
        const Flag f1 = flag_of(g, y1), f2 = flag_of(g, y2);
        const double d = dist(f1, f2);
        if (d < 1e-8) continue;
        const double v1 = best_worst(g, f1).value, v2 = best_worst(g, f2).value;
        worst = std::max(worst, std::abs(v1 - v2) / d);
        Vec x = rng.simplex_point(g.I);
        worst = std::max(worst, std::abs(worst_payoff(g, x, f1) - worst_payoff(g, x, f2)) / d);
    }
    return worst;
}

}  // namespace calib
