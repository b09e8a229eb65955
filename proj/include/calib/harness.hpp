#pragma once

// Experiment harness: adversaries, the seeded repeated-game runner, exact
// regret curves, log-log rate fitting and CSV/JSON artifacts.
//
// Evaluation is omniscient (it reads Nature's true actions from the
// trajectory); strategies only ever see what their mode allows.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "calib/bounds.hpp"
#include "calib/game.hpp"
#include "calib/strategy.hpp"

namespace calib {

// ---------------------------------------------------------------------------
// Adversaries
// ---------------------------------------------------------------------------

struct Adversary {
    enum class Kind { Iid, Sequence, Greedy };
    Kind kind = Kind::Iid;
    Vec y;                 // iid: mixed action over J
    std::vector<int> seq;  // sequence: cycled when shorter than the horizon

    static Adversary iid(Vec dist) {
        Adversary a;
        a.kind = Kind::Iid;
        a.y = std::move(dist);
        return a;
    }
    static Adversary sequence(std::vector<int> s) {
        Adversary a;
        a.kind = Kind::Sequence;
        a.seq = std::move(s);
        return a;
    }
    static Adversary greedy() {
        Adversary a;
        a.kind = Kind::Greedy;
        return a;
    }
};

namespace detail {

// one-step lookahead on the full-monitoring internal regret: picks the pure
// outcome maximizing the expected increment of the best (i,k) regret sum
// under the forecaster's stage action law. The law is a function of the
// history (Nature may simulate the algorithm); the realized coin of the
// stage stays hidden, as the simultaneous-play model requires.
inline int greedy_outcome(const FiniteGame& g, const Vec& action_law) {
    int best_j = 0;
    double best_val = -kInf;
    for (int j = 0; j < g.J; ++j) {
        double val = -kInf;
        for (int i = 0; i < g.I; ++i)
            for (int k = 0; k < g.I; ++k)
                val = std::max(val, action_law[i] * (g.payoff(k, j) - g.payoff(i, j)));
        if (val > best_val + 1e-15) {
            best_val = val;
            best_j = j;
        }
    }
    return best_j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct StageRecord {
    long n = 0;  // 1-based stage index
    int type = 0;
    int action = 0;
    int opponent = 0;
    int signal = 0;
    double payoff = 0.0;
};

struct Trajectory {
    std::vector<StageRecord> records;
    std::uint64_t seed = 0;
    nlohmann::json config;
};

struct RunResult {
    Trajectory trajectory;
    std::vector<Vec> type_actions;
    std::vector<int> type_pure;
    StrategyMode mode = StrategyMode::FullMonitoring;
};

inline RunResult run(const FiniteGame& game, const StrategyConfig& cfg, const Adversary& adv,
                     long horizon, std::uint64_t seed) {
    if (horizon < 0) throw ValidationError("run: negative horizon");
    if (adv.kind == Adversary::Kind::Iid) {
        if (int(adv.y.size()) != game.J || !is_probability_vector(adv.y, 1e-9))
            throw ValidationError("run: iid adversary distribution invalid");
    }
    if (adv.kind == Adversary::Kind::Sequence) {
        if (adv.seq.empty()) throw ValidationError("run: empty adversary sequence");
        for (int j : adv.seq)
            if (j < 0 || j >= game.J) throw ValidationError("run: sequence entry out of range");
    }

    StrategyConfig scfg = cfg;
    scfg.seed = Rng(seed).fork(1).seed();
    Strategy strat(game, scfg);
    Rng nature = Rng(seed).fork(2);

    RunResult out;
    out.trajectory.seed = seed;
    out.trajectory.config = {{"game", game_to_json(game)},
                             {"strategy", config_to_json(scfg)},
                             {"horizon", horizon},
                             {"seed", seed}};

    for (long n = 1; n <= horizon; ++n) {
        const Strategy::Stage st = strat.begin_stage();
        int j = 0;
        switch (adv.kind) {
            case Adversary::Kind::Iid:
                j = nature.sample(adv.y);
                break;
            case Adversary::Kind::Sequence:
                j = adv.seq[std::size_t((n - 1) % long(adv.seq.size()))];
                break;
            case Adversary::Kind::Greedy:
                j = detail::greedy_outcome(game, strat.last_action_law());
                break;
        }
        const int s = nature.sample(game.signal[st.action][j]);
        if (strat.mode() == StrategyMode::FullMonitoring || strat.mode() == StrategyMode::Naive)
            strat.observe_outcome(j);
        else
            strat.observe_signal(s);
        out.trajectory.records.push_back(
            {n, st.type, st.action, j, s, game.payoff(st.action, j)});
    }
    out.type_actions = strat.type_actions();
    out.type_pure.resize(strat.num_types());
    for (int l = 0; l < strat.num_types(); ++l) out.type_pure[l] = strat.type_pure_action(l);
    out.mode = strat.mode();
    return out;
}

// ---------------------------------------------------------------------------
// Regret curves (exact functions of the trajectory)
// ---------------------------------------------------------------------------

struct Curve {
    std::vector<long> n;
    Vec value;

    double final_value() const { return value.empty() ? 0.0 : value.back(); }
};

inline std::vector<long> checkpoints(long horizon) {
    std::vector<long> cps;
    for (long p = 1; p < horizon; p *= 2) cps.push_back(p);
    if (horizon > 0) cps.push_back(horizon);
    return cps;
}

// max_{i,k} (1/n) sum_{m <= n, i_m = i} [rho(k, j_m) - rho(i, j_m)]
inline Curve internal_regret_fm(const Trajectory& traj, const FiniteGame& g) {
    Curve c;
    const auto cps = checkpoints(long(traj.records.size()));
    Mat sums(g.I, g.I, 0.0);
    std::size_t r = 0;
    for (long cp : cps) {
        for (; r < traj.records.size() && traj.records[r].n <= cp; ++r) {
            const auto& rec = traj.records[r];
            for (int k = 0; k < g.I; ++k)
                sums(rec.action, k) += g.payoff(k, rec.opponent) - g.payoff(rec.action, rec.opponent);
        }
        double worst = 0.0;  // the diagonal contributes zero
        for (double v : sums.a) worst = std::max(worst, v);
        c.n.push_back(cp);
        c.value.push_back(worst / double(cp));
    }
    return c;
}

// max_l (N_n(l)/n) [ max_x W(x, fbar_n(l)) - rhobar_n(l) ], with the true
// per-type outcome frequencies supplied omnisciently by the harness
inline Curve internal_regret_pm(const Trajectory& traj, const FiniteGame& g, int num_types) {
    Curve c;
    const auto cps = checkpoints(long(traj.records.size()));
    std::vector<long> counts(num_types, 0);
    std::vector<Vec> freq(num_types, Vec(g.J, 0.0));  // outcome counts per type
    Vec paysum(num_types, 0.0);
    std::size_t r = 0;
    for (long cp : cps) {
        for (; r < traj.records.size() && traj.records[r].n <= cp; ++r) {
            const auto& rec = traj.records[r];
            ++counts[rec.type];
            freq[rec.type][rec.opponent] += 1.0;
            paysum[rec.type] += rec.payoff;
        }
        double worst = -kInf;
        for (int l = 0; l < num_types; ++l) {
            if (counts[l] == 0) continue;  // weighted contribution is zero
            Vec jbar = scaled(freq[l], 1.0 / double(counts[l]));
            const double sup = best_worst(g, flag_of(g, jbar)).value;
            const double regret = sup - paysum[l] / double(counts[l]);
            worst = std::max(worst, double(counts[l]) / double(cp) * regret);
        }
        c.n.push_back(cp);
        c.value.push_back(worst == -kInf ? 0.0 : worst);
    }
    return c;
}

// full monitoring: max_x rho(x, jbar_n) - rhobar_n
inline Curve external_regret_fm(const Trajectory& traj, const FiniteGame& g) {
    Curve c;
    const auto cps = checkpoints(long(traj.records.size()));
    Vec freq(g.J, 0.0);
    double paysum = 0.0;
    std::size_t r = 0;
    for (long cp : cps) {
        for (; r < traj.records.size() && traj.records[r].n <= cp; ++r) {
            freq[traj.records[r].opponent] += 1.0;
            paysum += traj.records[r].payoff;
        }
        Vec jbar = scaled(freq, 1.0 / double(cp));
        double best = -kInf;
        for (int i = 0; i < g.I; ++i) best = std::max(best, g.rho_pure_mixed(i, jbar));
        c.n.push_back(cp);
        c.value.push_back(best - paysum / double(cp));
    }
    return c;
}

// partial monitoring: max_x W(x, fbar_n) - rhobar_n
inline Curve external_regret_pm(const Trajectory& traj, const FiniteGame& g) {
    Curve c;
    const auto cps = checkpoints(long(traj.records.size()));
    Vec freq(g.J, 0.0);
    double paysum = 0.0;
    std::size_t r = 0;
    for (long cp : cps) {
        for (; r < traj.records.size() && traj.records[r].n <= cp; ++r) {
            freq[traj.records[r].opponent] += 1.0;
            paysum += traj.records[r].payoff;
        }
        Vec jbar = scaled(freq, 1.0 / double(cp));
        c.n.push_back(cp);
        c.value.push_back(best_worst(g, flag_of(g, jbar)).value - paysum / double(cp));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points_used = 0;
    int points_filtered = 0;  // nonpositive values dropped before the log fit
};

inline RateFit rate_fit(const Curve& c, long from, long to) {
    RateFit f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < c.n.size(); ++i) {
        if (c.n[i] < from || c.n[i] > to) continue;
        if (!(c.value[i] > 0.0)) {
            ++f.points_filtered;
            continue;
        }
        const double x = std::log(double(c.n[i]));
        const double y = std::log(c.value[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++f.points_used;
    }
    if (f.points_used < 2) throw ValidationError("rate_fit: fewer than two positive points in window");
    const double denom = f.points_used * sxx - sx * sx;
    f.slope = (f.points_used * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / f.points_used;
    return f;
}

// ---------------------------------------------------------------------------
// CSV artifacts
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << "n,type,action,opponent,signal,payoff\n";
    out.precision(17);
    for (const auto& r : traj.records)
        out << r.n << ',' << r.type << ',' << r.action << ',' << r.opponent << ',' << r.signal
            << ',' << r.payoff << '\n';
}

inline Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    Trajectory traj;
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,type,action,opponent,signal,payoff", 0) != 0)
        throw ValidationError("trajectory csv: bad header in '" + path + "'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        StageRecord r;
        char comma;
        std::istringstream ss(line);
        if (!(ss >> r.n >> comma >> r.type >> comma >> r.action >> comma >> r.opponent >> comma >>
              r.signal >> comma >> r.payoff))
            throw ValidationError("trajectory csv: bad row '" + line + "'");
        traj.records.push_back(r);
    }
    return traj;
}

struct CurveTable {
    std::vector<long> n;
    Vec internal_fm, internal_pm, external;
};

inline void write_curves_csv(const std::string& path, const CurveTable& t) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << "n,internal_fm,internal_pm,external\n";
    out.precision(17);
    for (std::size_t i = 0; i < t.n.size(); ++i)
        out << t.n[i] << ',' << t.internal_fm[i] << ',' << t.internal_pm[i] << ',' << t.external[i]
            << '\n';
}

inline CurveTable read_curves_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    CurveTable t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,internal_fm,internal_pm,external", 0) != 0)
        throw ValidationError("curves csv: bad header in '" + path + "'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long n;
        double a, b, c;
        char comma;
        std::istringstream ss(line);
        if (!(ss >> n >> comma >> a >> comma >> b >> comma >> c))
            throw ValidationError("curves csv: bad row '" + line + "'");
        t.n.push_back(n);
        t.internal_fm.push_back(a);
        t.internal_pm.push_back(b);
        t.external.push_back(c);
    }
    return t;
}

// all three regret curves of one run
inline CurveTable curve_table(const RunResult& rr, const FiniteGame& g) {
    CurveTable t;
    const Curve fm = internal_regret_fm(rr.trajectory, g);
    const Curve pm = internal_regret_pm(rr.trajectory, g, int(rr.type_actions.size()));
    const bool partial =
        rr.mode == StrategyMode::PartialOutcome || rr.mode == StrategyMode::PartialAction;
    const Curve ext =
        partial ? external_regret_pm(rr.trajectory, g) : external_regret_fm(rr.trajectory, g);
    t.n = fm.n;
    t.internal_fm = fm.value;
    t.internal_pm = pm.value;
    t.external = ext.value;
    return t;
}

inline double median(Vec v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline CurveTable median_table(const std::vector<CurveTable>& tables) {
    CurveTable out;
    out.n = tables.at(0).n;
    for (std::size_t i = 0; i < out.n.size(); ++i) {
        Vec a, b, c;
        for (const auto& t : tables) {
            a.push_back(t.internal_fm[i]);
            b.push_back(t.internal_pm[i]);
            c.push_back(t.external[i]);
        }
        out.internal_fm.push_back(median(a));
        out.internal_pm.push_back(median(b));
        out.external.push_back(median(c));
    }
    return out;
}

}  // namespace calib
