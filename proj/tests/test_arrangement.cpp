#include <catch_amalgamated.hpp>

#include <set>

#include "calib/arrangement.hpp"
#include "calib/rng.hpp"

using namespace calib;

TEST_CASE("arrangement: single cut of the unit interval") {
    std::vector<Hyperplane> hs = {{{1.0}, -0.5}};
    Polytope dom = Polytope::box({0.0}, {1.0});
    auto arr = arrangement_cells(hs, dom);
    REQUIRE(arr.cells.size() == 2);
    std::set<std::vector<int>> sigs;
    for (const auto& c : arr.cells) sigs.insert(c.signs);
    REQUIRE(sigs.count({-1}) == 1);
    REQUIRE(sigs.count({+1}) == 1);
    for (const auto& c : arr.cells) {
        const double v = hs[0].eval(c.interior_point);
        REQUIRE(v * c.signs[0] > 0);
    }
}

TEST_CASE("arrangement: two generic lines make four cells") {
    std::vector<Hyperplane> hs = {{{1.0, 0.3}, -0.55}, {{-0.2, 1.0}, -0.45}};
    Polytope dom = Polytope::box({0.0, 0.0}, {1.0, 1.0});
    auto arr = arrangement_cells(hs, dom);
    REQUIRE(arr.cells.size() == 4);

    // enumerate sign vectors of sampled points; all four appear, and each
    // sample lands in the cell carrying its sign vector
    Rng rng(3);
    std::set<std::vector<int>> seen;
    for (int it = 0; it < 10000; ++it) {
        Vec z = rng.uniform_vec(2, 0.0, 1.0);
        const int idx = arr.locate_by_signs(z);
        if (idx < 0) continue;
        seen.insert(arr.cells[idx].signs);
        REQUIRE(arr.cells[idx].poly.contains(z, 1e-9));
        int owners = 0;
        for (const auto& c : arr.cells)
            if (c.poly.contains(z, -1e-9)) ++owners;
        REQUIRE(owners == 1);
    }
    REQUIRE(seen.size() == 4);
}

TEST_CASE("arrangement: no hyperplanes yields the domain itself") {
    Polytope dom = Polytope::box({0.0, 0.0}, {1.0, 1.0});
    auto arr = arrangement_cells({}, dom);
    REQUIRE(arr.cells.size() == 1);
    REQUIRE(arr.cells[0].signs.empty());
}

TEST_CASE("arrangement: empty domain raises") {
    Polytope dom(1);
    dom.add_facet({1.0}, 0.0);
    dom.add_facet({-1.0}, 1.0);
    REQUIRE_THROWS_AS(arrangement_cells({{{1.0}, -0.5}}, dom), DomainEmpty);
}

TEST_CASE("arrangement: duplicated hyperplane with flipped orientation") {
    std::vector<Hyperplane> hs = {{{1.0}, -0.5}, {{-2.0}, 1.0}};  // same line twice
    Polytope dom = Polytope::box({0.0}, {1.0});
    auto arr = arrangement_cells(hs, dom);
    REQUIRE(arr.cells.size() == 2);
    for (const auto& c : arr.cells) REQUIRE(c.signs[0] == -c.signs[1]);
}

TEST_CASE("arrangement: cell count respects Buck's bound on random instances") {
    Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const int T = 2 + int(rng.uniform() * 5);
        std::vector<Hyperplane> hs;
        for (int t = 0; t < T; ++t) hs.push_back({rng.unit_vector(2), rng.uniform(-0.5, 0.5)});
        Polytope dom = Polytope::box({-30.0, -30.0}, {30.0, 30.0});
        auto arr = arrangement_cells(hs, dom);
        REQUIRE(arr.cells.size() <= cell_count_bound(T, 2));
    }
}

TEST_CASE("cell_count_bound: closed forms") {
    REQUIRE(cell_count_bound(2, 2) == 4);
    REQUIRE(cell_count_bound(1, 1) == 2);
    for (int T = 0; T <= 6; ++T) REQUIRE(cell_count_bound(T, 8) == (1ull << T));
    // phi(T,d) <= (1+d) T^d / d! for T >= 2d
    for (int d = 1; d <= 3; ++d) {
        double fact = 1;
        for (int i = 2; i <= d; ++i) fact *= i;
        for (int T = 2 * d; T <= 12; ++T) {
            REQUIRE(double(cell_count_bound(T, d)) <=
                    (1.0 + d) * std::pow(double(T), d) / fact + 1e-9);
        }
    }
}
