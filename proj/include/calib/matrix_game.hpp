#pragma once

// Zero-sum matrix game values and optimal mixed strategies via LP duality.
// Convention: the row player maximizes min_j sum_l lambda(l) A(l,j), the
// column player minimizes max_l sum_j y(j) A(l,j).

#include "calib/linalg.hpp"
#include "calib/lp.hpp"

namespace calib {

struct GameSolution {
    double value = 0.0;
    Vec row;     // maximizing mixed strategy
    Vec column;  // minimizing mixed strategy
};

inline GameSolution matrix_game(const Mat& A) {
    const int L = A.rows, J = A.cols;
    GameSolution sol;
    if (L == 0 || J == 0) throw std::invalid_argument("matrix_game: empty matrix");

    {
        // max v  s.t.  sum_l lambda_l A(l,j) >= v for all j, lambda in simplex
        LinearProgram lp;
        lp.maximize = true;
        lp.objective.assign(L + 1, 0.0);
        lp.objective[L] = 1.0;
        lp.lower.assign(L + 1, 0.0);
        lp.upper.assign(L + 1, kInf);
        lp.lower[L] = -kInf;
        for (int j = 0; j < J; ++j) {
            Vec row(L + 1, 0.0);
            for (int l = 0; l < L; ++l) row[l] = A(l, j);
            row[L] = -1.0;
            lp.add_row(row, Sense::GE, 0.0);
        }
        Vec ones(L + 1, 1.0);
        ones[L] = 0.0;
        lp.add_row(ones, Sense::EQ, 1.0);
        LpResult r = solve_lp(lp);
        sol.value = r.x[L];
        sol.row.assign(r.x.begin(), r.x.begin() + L);
    }
    {
        // min u  s.t.  sum_j y_j A(l,j) <= u for all l, y in simplex
        LinearProgram lp;
        lp.maximize = false;
        lp.objective.assign(J + 1, 0.0);
        lp.objective[J] = 1.0;
        lp.lower.assign(J + 1, 0.0);
        lp.upper.assign(J + 1, kInf);
        lp.lower[J] = -kInf;
        for (int l = 0; l < L; ++l) {
            Vec row(J + 1, 0.0);
            for (int j = 0; j < J; ++j) row[j] = A(l, j);
            row[J] = -1.0;
            lp.add_row(row, Sense::LE, 0.0);
        }
        Vec ones(J + 1, 1.0);
        ones[J] = 0.0;
        lp.add_row(ones, Sense::EQ, 1.0);
        LpResult r = solve_lp(lp);
        sol.column.assign(r.x.begin(), r.x.begin() + J);
    }
    return sol;
}

}  // namespace calib
