#pragma once

// Calibrated forecasting engines.
//
// Weighted (Laguerre) calibration: the auxiliary vector payoff of stage n is
//     U^{lk} = [||o_n - z(l)||^2 - w(l)] - [||o_n - z(k)||^2 - w(k)]   (row l_n)
// and the predictor plays any invariant measure of the positive part of the
// running average. That choice satisfies Blackwell's approachability
// condition for the negative orthant exactly, stage by stage.
//
// Complex calibration: cells K(l) = {y : <y,c_{t,l}> <= b_{t,l}} with padded
// (0,0) rows; the payoff is U^{l,t} = <o_n, c_{t,l}> - b_{t,l} on row l_n and
// the step solves one zero-sum matrix game against the pure outcomes.

#include <algorithm>
#include <optional>
#include <vector>

#include <json.hpp>

#include "calib/br_complex.hpp"
#include "calib/invariant.hpp"
#include "calib/laguerre.hpp"
#include "calib/linalg.hpp"
#include "calib/matrix_game.hpp"

namespace calib {

struct NeighborMask {
    std::vector<std::vector<bool>> adjacent;
    int max_neighbors = 0;

    // sup_m E||U'_m||^2 = 4 N with neighbor-restricted payoffs
    double m_bound() const { return 2.0 * std::sqrt(double(max_neighbors)); }
};

inline NeighborMask neighbor_restrict(const LaguerreDiagram& diag, const Polytope& domain) {
    if (diag.size() < 2) throw std::invalid_argument("neighbor_restrict: need at least 2 cells");
    NeighborMask m;
    m.adjacent = neighbors(diag, domain);
    for (const auto& row : m.adjacent) {
        int c = 0;
        for (bool b : row) c += b ? 1 : 0;
        m.max_neighbors = std::max(m.max_neighbors, c);
    }
    return m;
}

class CalibrationState {
  public:
    // sites/weights empty <=> single degenerate type
    CalibrationState(std::vector<Vec> sites, Vec weights, std::vector<Vec> test_outcomes)
        : sites_(std::move(sites)),
          weights_(std::move(weights)),
          test_outcomes_(std::move(test_outcomes)) {
        if (sites_.empty()) {
            sites_ = {Vec{}};
            weights_ = {0.0};
        }
        const int L = int(sites_.size());
        counts_.assign(L, 0);
        mean_obs_.assign(L, Vec(obs_dim(), 0.0));
        cum_U_ = Mat(L, L, 0.0);
    }

    static CalibrationState from_refined(const RefinedDiagram& rd, std::vector<Vec> test_outcomes) {
        if (rd.diagram)
            return CalibrationState(rd.diagram->sites, rd.diagram->weights, std::move(test_outcomes));
        return CalibrationState({Vec{}}, {0.0}, std::move(test_outcomes));
    }

    // pure Voronoi scores (all weights zero), e.g. for grid calibration
    static CalibrationState voronoi(std::vector<Vec> sites, std::vector<Vec> test_outcomes) {
        const std::size_t L = sites.size();
        return CalibrationState(std::move(sites), Vec(L, 0.0), std::move(test_outcomes));
    }

    int num_types() const { return int(sites_.size()); }
    int obs_dim() const { return int(sites_[0].size()); }
    long stage() const { return n_; }
    const std::vector<long>& counts() const { return counts_; }
    const Vec& mean_observation(int l) const { return mean_obs_[l]; }
    const Mat& cumulative_payoff() const { return cum_U_; }  // n * Ubar
    const std::vector<Vec>& sites() const { return sites_; }
    const Vec& site_weights() const { return weights_; }
    const std::vector<Vec>& test_outcomes() const { return test_outcomes_; }

    void set_mask(NeighborMask mask) { mask_ = std::move(mask); }
    const std::optional<NeighborMask>& mask() const { return mask_; }

    double power_score(int l, const Vec& o) const { return dist2(o, sites_[l]) - weights_[l]; }

    bool pair_active(int l, int k) const {
        return !mask_ || mask_->adjacent[l][k];
    }

    // positive part of the average payoff matrix
    Mat average_positive() const {
        const int L = num_types();
        Mat P(L, L, 0.0);
        const double denom = double(std::max<long>(n_, 1));
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < L; ++k) P(l, k) = std::max(cum_U_(l, k), 0.0) / denom;
        return P;
    }

    // max_{l,k} (N_n(l)/n) ([||obar(l)-z(l)||^2-w(l)] - [||obar(l)-z(k)||^2-w(k)])^+,
    // which equals the largest positive entry of the average payoff matrix
    double max_weighted_score() const {
        double worst = 0.0;
        const double denom = double(std::max<long>(n_, 1));
        for (double v : cum_U_.a) worst = std::max(worst, v / denom);
        return worst;
    }

    // test hook: inject a cumulative payoff matrix
    void set_cumulative_payoff(Mat m, long n) {
        cum_U_ = std::move(m);
        n_ = n;
    }

    void update(int l, const Vec& o) {
        if (l < 0 || l >= num_types()) throw std::invalid_argument("calib_update: bad type index");
        ++n_;
        ++counts_[l];
        for (int q = 0; q < obs_dim(); ++q)
            mean_obs_[l][q] += (o[q] - mean_obs_[l][q]) / double(counts_[l]);
        const double pl = power_score(l, o);
        for (int k = 0; k < num_types(); ++k) {
            if (k == l || !pair_active(l, k)) continue;
            cum_U_(l, k) += pl - power_score(k, o);
        }
    }

    nlohmann::json snapshot() const {
        nlohmann::json j;
        j["n"] = n_;
        j["counts"] = counts_;
        j["mean_observations"] = mean_obs_;
        auto rows = nlohmann::json::array();
        for (int l = 0; l < num_types(); ++l) rows.push_back(cum_U_.row(l));
        j["cumulative_payoff"] = rows;
        j["sites"] = sites_;
        j["weights"] = weights_;
        return j;
    }

    static CalibrationState from_snapshot(const nlohmann::json& j, std::vector<Vec> test_outcomes) {
        try {
            CalibrationState st(j.at("sites").get<std::vector<Vec>>(), j.at("weights").get<Vec>(),
                                std::move(test_outcomes));
            st.n_ = j.at("n").get<long>();
            st.counts_ = j.at("counts").get<std::vector<long>>();
            st.mean_obs_ = j.at("mean_observations").get<std::vector<Vec>>();
            const auto rows = j.at("cumulative_payoff");
            for (int l = 0; l < st.num_types(); ++l)
                for (int k = 0; k < st.num_types(); ++k) st.cum_U_(l, k) = rows.at(l).at(k).get<double>();
            return st;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("calibration snapshot: ") + e.what());
        }
    }

  private:
    std::vector<Vec> sites_;
    Vec weights_;
    std::vector<Vec> test_outcomes_;
    long n_ = 0;
    std::vector<long> counts_;
    std::vector<Vec> mean_obs_;
    Mat cum_U_;
    std::optional<NeighborMask> mask_;
};

// Next-stage type distribution: any invariant measure of the positive part.
// The first stage (n = 0) plays uniformly.
inline Vec calib_step(const CalibrationState& st) {
    const int L = st.num_types();
    if (st.stage() == 0) return Vec(L, 1.0 / L);
    return invariant_measure(st.average_positive());
}

// max over the supplied pure outcomes o of |<Ubar+, E_lambda[U | o]>|; zero
// (up to solver accuracy) whenever lambda is an invariant measure of Ubar+.
inline double blackwell_residual(const CalibrationState& st, const Vec& lambda) {
    const Mat P = st.average_positive();
    const int L = st.num_types();
    double worst = 0.0;
    for (const Vec& o : st.test_outcomes()) {
        double inner = 0.0;
        for (int l = 0; l < L; ++l) {
            if (lambda[l] == 0.0) continue;
            const double pl = st.power_score(l, o);
            for (int k = 0; k < L; ++k) {
                if (k == l || P(l, k) == 0.0 || !st.pair_active(l, k)) continue;
                inner += P(l, k) * lambda[l] * (pl - st.power_score(k, o));
            }
        }
        worst = std::max(worst, std::abs(inner));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Calibration with respect to a polytopial complex (approachability form)
// ---------------------------------------------------------------------------

class ComplexCalibrationState {
  public:
    // cells given in the coordinates the observations will arrive in;
    // pure_outcomes are the possible observation vectors of Nature's moves
    ComplexCalibrationState(const std::vector<Polytope>& cells, std::vector<Vec> pure_outcomes)
        : pure_outcomes_(std::move(pure_outcomes)) {
        if (cells.empty()) throw std::invalid_argument("complex calibration: no cells");
        L0_ = int(cells.size());
        T_ = 0;
        for (const auto& c : cells) T_ = std::max(T_, int(c.facets().size()));
        dim_ = cells[0].dim();
        cs_.assign(L0_, std::vector<Vec>(T_, Vec(dim_, 0.0)));
        bs_.assign(L0_, Vec(T_, 0.0));
        for (int l = 0; l < L0_; ++l) {
            for (std::size_t t = 0; t < cells[l].facets().size(); ++t) {
                cs_[l][t] = cells[l].facets()[t].a;          // <o,c> + b <= 0
                bs_[l][t] = -cells[l].facets()[t].b;         // stored as <o,c> <= b
            }
        }
        counts_.assign(L0_, 0);
        mean_obs_.assign(L0_, Vec(dim_, 0.0));
        cum_U_ = Mat(L0_, T_, 0.0);
    }

    int num_cells() const { return L0_; }
    int num_constraints() const { return T_; }
    long stage() const { return n_; }
    const std::vector<long>& counts() const { return counts_; }
    const Vec& mean_observation(int l) const { return mean_obs_[l]; }
    const Mat& cumulative_payoff() const { return cum_U_; }
    const std::vector<Vec>& pure_outcomes() const { return pure_outcomes_; }

    double constraint_score(int l, int t, const Vec& o) const {
        return dot(o, cs_[l][t]) - bs_[l][t];
    }

    void update(int l, const Vec& o) {
        ++n_;
        ++counts_[l];
        for (int q = 0; q < dim_; ++q) mean_obs_[l][q] += (o[q] - mean_obs_[l][q]) / double(counts_[l]);
        for (int t = 0; t < T_; ++t) cum_U_(l, t) += constraint_score(l, t, o);
    }

    Mat average_positive() const {
        Mat P(L0_, T_, 0.0);
        const double denom = double(std::max<long>(n_, 1));
        for (int l = 0; l < L0_; ++l)
            for (int t = 0; t < T_; ++t) P(l, t) = std::max(cum_U_(l, t), 0.0) / denom;
        return P;
    }

    // max_l (N_n(l)/n) (<obar(l), c_{t,l}> - b_{t,l})^+  ==  ||(Ubar)^+||_max
    double max_cell_score() const {
        double worst = 0.0;
        const double denom = double(std::max<long>(n_, 1));
        for (double v : cum_U_.a) worst = std::max(worst, v / denom);
        return worst;
    }

    // payoff of the auxiliary game: G(l, j) = sum_t Ubar+(l,t) score(l,t,o_j)
    Mat halfspace_game() const {
        const Mat P = average_positive();
        Mat G(L0_, int(pure_outcomes_.size()), 0.0);
        for (int l = 0; l < L0_; ++l)
            for (int j = 0; j < int(pure_outcomes_.size()); ++j) {
                double s = 0.0;
                for (int t = 0; t < T_; ++t)
                    if (P(l, t) != 0.0) s += P(l, t) * constraint_score(l, t, pure_outcomes_[j]);
                G(l, j) = s;
            }
        return G;
    }

  private:
    int L0_ = 0, T_ = 0, dim_ = 0;
    std::vector<std::vector<Vec>> cs_;
    std::vector<Vec> bs_;
    std::vector<Vec> pure_outcomes_;
    long n_ = 0;
    std::vector<long> counts_;
    std::vector<Vec> mean_obs_;
    Mat cum_U_;
};

// One approachability step toward the negative orthant: the optimal row
// strategy of the zero-sum game whose payoff couples the positive part with
// the next-stage constraint scores. Guarantees  <Ubar+, E_lambda[U | j]> <= 0
// against every pure outcome (cells cover the domain, so the game value is
// nonpositive). A zero positive part yields the uniform distribution.
inline Vec complex_calib_step(const ComplexCalibrationState& st) {
    const int L0 = st.num_cells();
    const Mat G = st.halfspace_game();
    if (G.max_abs() == 0.0) return Vec(L0, 1.0 / L0);
    Mat negG(L0, G.cols);
    for (int l = 0; l < L0; ++l)
        for (int j = 0; j < G.cols; ++j) negG(l, j) = -G(l, j);
    return matrix_game(negG).row;
}

// max over pure outcomes of <Ubar+, E_lambda[U | j]>; the Blackwell
// half-space condition asks this to be <= 0
inline double complex_blackwell_residual(const ComplexCalibrationState& st, const Vec& lambda) {
    const Mat G = st.halfspace_game();
    double worst = -kInf;
    for (int j = 0; j < G.cols; ++j) {
        double s = 0.0;
        for (int l = 0; l < st.num_cells(); ++l) s += lambda[l] * G(l, j);
        worst = std::max(worst, s);
    }
    return worst;
}

}  // namespace calib
