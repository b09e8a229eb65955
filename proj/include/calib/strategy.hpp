#pragma once

// End-to-end regret-minimizing players.
//
//   fm          calibrated Laguerre forecaster over Delta(J), plays the pure
//               best response attached to the predicted cell
//   pm-outcome  calibrates on observed signal indicators over the flag set
//               (signal laws must not depend on the player's own action)
//   pm-action   calibrates on importance-weighted flag estimators e_n under
//               a gamma_n-perturbation of the cell actions
//   naive       delta-grid Voronoi calibration baseline over Delta(J)
//
// A Strategy owns its RNG; given the same seed and observations the
// trajectory is bit-reproducible.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "calib/br_complex.hpp"
#include "calib/calibration.hpp"
#include "calib/game.hpp"
#include "calib/rng.hpp"

namespace calib {

enum class StrategyMode { FullMonitoring, PartialOutcome, PartialAction, Naive };

inline std::string mode_name(StrategyMode m) {
    switch (m) {
        case StrategyMode::FullMonitoring: return "fm";
        case StrategyMode::PartialOutcome: return "pm-outcome";
        case StrategyMode::PartialAction: return "pm-action";
        case StrategyMode::Naive: return "naive";
    }
    return "?";
}

inline StrategyMode mode_from_name(const std::string& s) {
    if (s == "fm") return StrategyMode::FullMonitoring;
    if (s == "pm-outcome") return StrategyMode::PartialOutcome;
    if (s == "pm-action") return StrategyMode::PartialAction;
    if (s == "naive") return StrategyMode::Naive;
    throw ValidationError("unknown strategy mode '" + s + "'");
}

struct StrategyConfig {
    StrategyMode mode = StrategyMode::FullMonitoring;
    double gamma_exponent = -1.0 / 3.0;
    double delta = 0.2;  // naive grid mesh
    std::uint64_t seed = 0;
};

inline nlohmann::json config_to_json(const StrategyConfig& c) {
    return {{"mode", mode_name(c.mode)},
            {"gamma_exponent", c.gamma_exponent},
            {"delta", c.delta},
            {"seed", c.seed}};
}

inline StrategyConfig config_from_json(const nlohmann::json& j) {
    StrategyConfig c;
    try {
        c.mode = mode_from_name(j.at("mode").get<std::string>());
        if (j.contains("gamma_exponent")) c.gamma_exponent = j.at("gamma_exponent").get<double>();
        if (j.contains("delta")) c.delta = j.at("delta").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("strategy config: ") + e.what());
    }
    return c;
}

// importance-weighted flag estimator: one nonzero entry 1/prob at the played
// (action, signal) pair; unbiased for the stage flag
inline Vec estimator_vector(int I, int S, int played, int sig, double prob) {
    Vec e(std::size_t(I) * S, 0.0);
    e[std::size_t(played) * S + sig] = 1.0 / prob;
    return e;
}

class Strategy {
  public:
    struct Stage {
        int type = 0;
        int action = 0;
        Vec emitted;  // the distribution the action was drawn from
    };

    Strategy(const FiniteGame& game, const StrategyConfig& cfg)
        : game_(game), cfg_(cfg), rng_(cfg.seed) {
        game_.validate();
        switch (cfg_.mode) {
            case StrategyMode::FullMonitoring: {
                auto cx = full_monitoring_complex(game_);
                refined_ = refine_to_laguerre(cx);
                chart_ = refined_->chart;
                type_actions_ = refined_->actions;
                type_pure_ = refined_->pure_actions;
                state_.emplace(CalibrationState::from_refined(*refined_, outcome_charts()));
                break;
            }
            case StrategyMode::Naive: {
                chart_ = Chart::simplex(game_.J);
                build_naive_grid();
                state_.emplace(CalibrationState::voronoi(naive_sites_, outcome_charts()));
                break;
            }
            case StrategyMode::PartialOutcome: {
                if (!game_.outcome_dependent_only())
                    throw ModeMismatch("pm-outcome: signal law depends on the player's own action");
                auto cx = partial_monitoring_complex(game_);
                refined_ = refine_to_laguerre(cx);
                chart_ = refined_->chart;
                type_actions_ = refined_->actions;
                type_pure_ = refined_->pure_actions;
                state_.emplace(CalibrationState::from_refined(*refined_, signal_charts()));
                break;
            }
            case StrategyMode::PartialAction: {
                auto cx = partial_monitoring_complex(game_);
                refined_ = refine_to_laguerre(cx);
                chart_ = refined_->chart;
                type_actions_ = refined_->actions;
                type_pure_ = refined_->pure_actions;
                state_.emplace(CalibrationState::from_refined(*refined_, estimator_charts()));
                break;
            }
        }
    }

    StrategyMode mode() const { return cfg_.mode; }
    const StrategyConfig& config() const { return cfg_; }
    long completed_stages() const { return n_; }
    int num_types() const { return int(type_actions_.size()); }
    const std::vector<Vec>& type_actions() const { return type_actions_; }
    int type_pure_action(int l) const { return type_pure_[l]; }
    const CalibrationState& calibration() const { return *state_; }
    const Vec& last_type_distribution() const { return last_lambda_; }
    const std::optional<RefinedDiagram>& refined() const { return refined_; }
    const Chart& chart() const { return chart_; }

    double gamma_hat(long n) const {
        return std::min(1.0, double(game_.I) * std::pow(double(n), cfg_.gamma_exponent));
    }
    double gamma_floor(long n) const { return gamma_hat(n) / double(game_.I); }

    // the stage-n action law marginalized over the type draw; a function of
    // the history alone, so an omniscient adversary may legitimately see it
    const Vec& last_action_law() const { return last_action_law_; }

    Stage begin_stage() {
        if (pending_) throw Error("begin_stage: previous observation missing");
        last_lambda_ = calib_step(*state_);
        last_action_law_.assign(game_.I, 0.0);
        for (int l = 0; l < num_types(); ++l) {
            if (last_lambda_[l] == 0.0) continue;
            if (cfg_.mode == StrategyMode::PartialAction) {
                const double gh = gamma_hat(n_ + 1);
                for (int i = 0; i < game_.I; ++i)
                    last_action_law_[i] +=
                        last_lambda_[l] * ((1.0 - gh) * type_actions_[l][i] + gh / game_.I);
            } else {
                for (int i = 0; i < game_.I; ++i)
                    last_action_law_[i] += last_lambda_[l] * type_actions_[l][i];
            }
        }
        Stage st;
        st.type = rng_.sample(last_lambda_);
        switch (cfg_.mode) {
            case StrategyMode::FullMonitoring:
            case StrategyMode::Naive: {
                st.action = type_pure_[st.type];
                st.emitted.assign(game_.I, 0.0);
                st.emitted[st.action] = 1.0;
                break;
            }
            case StrategyMode::PartialOutcome: {
                st.emitted = type_actions_[st.type];
                st.action = rng_.sample(st.emitted);
                break;
            }
            case StrategyMode::PartialAction: {
                const double gh = gamma_hat(n_ + 1);
                st.emitted.assign(game_.I, 0.0);
                for (int i = 0; i < game_.I; ++i)
                    st.emitted[i] = (1.0 - gh) * type_actions_[st.type][i] + gh / game_.I;
                st.action = rng_.sample(st.emitted);
                break;
            }
        }
        pending_ = st;
        return st;
    }

    // full monitoring and the naive baseline observe Nature's action
    void observe_outcome(int j) {
        if (cfg_.mode != StrategyMode::FullMonitoring && cfg_.mode != StrategyMode::Naive)
            throw ModeMismatch("observe_outcome: partial-monitoring strategy");
        require_pending();
        Vec amb(game_.J, 0.0);
        amb[j] = 1.0;
        finish(chart_.to_chart(amb));
    }

    // partial-monitoring modes observe only the signal
    void observe_signal(int s) {
        require_pending();
        if (cfg_.mode == StrategyMode::PartialOutcome) {
            Vec amb(std::size_t(game_.I) * game_.S, 0.0);
            for (int i = 0; i < game_.I; ++i) amb[std::size_t(i) * game_.S + s] = 1.0;
            finish(chart_.to_chart(amb));
        } else if (cfg_.mode == StrategyMode::PartialAction) {
            const Vec e = estimator_vector(game_.I, game_.S, pending_->action, s,
                                           pending_->emitted[pending_->action]);
            finish(chart_.to_chart(e));
        } else {
            throw ModeMismatch("observe_signal: full-monitoring strategy");
        }
    }

  private:
    void require_pending() const {
        if (!pending_) throw Error("observe: no stage in progress");
    }

    void finish(const Vec& obs_chart) {
        state_->update(pending_->type, obs_chart);
        ++n_;
        pending_.reset();
    }

    std::vector<Vec> outcome_charts() const {
        std::vector<Vec> out;
        for (int j = 0; j < game_.J; ++j) {
            Vec amb(game_.J, 0.0);
            amb[j] = 1.0;
            out.push_back(chart_.to_chart(amb));
        }
        return out;
    }

    std::vector<Vec> signal_charts() const {
        std::vector<Vec> out;
        for (int s = 0; s < game_.S; ++s) {
            Vec amb(std::size_t(game_.I) * game_.S, 0.0);
            for (int i = 0; i < game_.I; ++i) amb[std::size_t(i) * game_.S + s] = 1.0;
            out.push_back(chart_.to_chart(amb));
        }
        return out;
    }

    std::vector<Vec> estimator_charts() const {
        std::vector<Vec> out;
        for (int i = 0; i < game_.I; ++i)
            for (int s = 0; s < game_.S; ++s)
                out.push_back(chart_.to_chart(estimator_vector(game_.I, game_.S, i, s, 1.0)));
        return out;
    }

    void build_naive_grid() {
        if (cfg_.delta <= 0.0) throw ValidationError("naive: delta must be positive");
        const int k = game_.J - 1;
        const int per_axis = int(std::floor(1.0 / cfg_.delta + 1e-12)) + 1;
        // lattice { m * delta } per axis intersected with the simplex chart
        std::vector<Vec> pts;
        Vec cur(k, 0.0);
        std::vector<int> idx(k, 0);
        while (true) {
            double sum = 0.0;
            for (int q = 0; q < k; ++q) {
                cur[q] = idx[q] * cfg_.delta;
                sum += cur[q];
            }
            if (sum <= 1.0 + 1e-12) {
                pts.push_back(cur);
                if (pts.size() > 100000) throw Error("naive: grid exceeds the memory budget");
            }
            int q = 0;
            while (q < k && ++idx[q] == per_axis) idx[q++] = 0;
            if (q == k) break;
            if (k == 0) break;
        }
        if (k == 0) pts.assign(1, Vec{});
        naive_sites_ = pts;
        for (const auto& p : pts) {
            const Vec y = chart_.to_ambient(p);
            int best = 0;
            for (int i = 1; i < game_.I; ++i)
                if (game_.rho_pure_mixed(i, y) > game_.rho_pure_mixed(best, y) + 1e-15) best = i;
            Vec x(game_.I, 0.0);
            x[best] = 1.0;
            type_actions_.push_back(std::move(x));
            type_pure_.push_back(best);
        }
    }

    FiniteGame game_;
    StrategyConfig cfg_;
    Chart chart_;
    std::optional<RefinedDiagram> refined_;
    std::vector<Vec> naive_sites_;
    std::vector<Vec> type_actions_;
    std::vector<int> type_pure_;
    std::optional<CalibrationState> state_;
    Rng rng_;
    Vec last_lambda_;
    Vec last_action_law_;
    std::optional<Stage> pending_;
    long n_ = 0;
};

// spec-surface constructors
inline Strategy make_fm_strategy(const FiniteGame& g, std::uint64_t seed = 0) {
    StrategyConfig c;
    c.mode = StrategyMode::FullMonitoring;
    c.seed = seed;
    return Strategy(g, c);
}

inline Strategy make_pm_outcome_strategy(const FiniteGame& g, std::uint64_t seed = 0) {
    StrategyConfig c;
    c.mode = StrategyMode::PartialOutcome;
    c.seed = seed;
    return Strategy(g, c);
}

inline Strategy make_pm_action_strategy(const FiniteGame& g, double gamma_exponent = -1.0 / 3.0,
                                        std::uint64_t seed = 0) {
    StrategyConfig c;
    c.mode = StrategyMode::PartialAction;
    c.gamma_exponent = gamma_exponent;
    c.seed = seed;
    return Strategy(g, c);
}

inline Strategy make_naive_strategy(const FiniteGame& g, double delta, std::uint64_t seed = 0) {
    StrategyConfig c;
    c.mode = StrategyMode::Naive;
    c.delta = delta;
    c.seed = seed;
    return Strategy(g, c);
}

}  // namespace calib
