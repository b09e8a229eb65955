#include <catch_amalgamated.hpp>

#include "calib/geometry.hpp"
#include "calib/rng.hpp"

using namespace calib;

namespace {
Polytope standard_simplex_2d() {
    Polytope p(2);
    p.add_facet({-1.0, 0.0}, 0.0);
    p.add_facet({0.0, -1.0}, 0.0);
    p.add_facet({1.0, 1.0}, -1.0);
    p.add_facet({-1.0, -1.0}, 1.0);
    return p;
}
}  // namespace

TEST_CASE("projection: clamp onto an interval") {
    Polytope p(1);
    p.add_facet({1.0}, -1.0);
    p.add_facet({-1.0}, 0.0);
    REQUIRE_THAT(project_onto_polytope({2.0}, p)[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    Vec inside = {0.37};
    REQUIRE_THAT(project_onto_polytope(inside, p)[0], Catch::Matchers::WithinAbs(0.37, 1e-12));
}

TEST_CASE("projection: onto the standard simplex in R^2") {
    Vec pr = project_onto_polytope({2.0, 2.0}, standard_simplex_2d());
    REQUIRE_THAT(pr[0], Catch::Matchers::WithinAbs(0.5, 1e-9));
    REQUIRE_THAT(pr[1], Catch::Matchers::WithinAbs(0.5, 1e-9));
}

TEST_CASE("projection: variational inequality against all vertices") {
    Rng rng(7);
    Polytope p = standard_simplex_2d();
    auto verts = p.vertices();
    REQUIRE(verts.size() == 2);
    for (int rep = 0; rep < 200; ++rep) {
        Vec z = rng.uniform_vec(2, -2.0, 3.0);
        Vec pr = project_onto_polytope(z, p);
        for (const auto& v : verts) {
            REQUIRE(dot(sub(z, pr), sub(v, pr)) <= 1e-9);
        }
    }
}

TEST_CASE("projection: idempotent and 1-Lipschitz") {
    Rng rng(8);
    Polytope p(3);
    p.add_facet({-1, 0, 0}, 0.0);
    p.add_facet({0, -1, 0}, 0.0);
    p.add_facet({0, 0, -1}, 0.0);
    p.add_facet({1, 1, 1}, -1.0);
    p.add_facet({1, -1, 0.5}, -0.3);
    for (int rep = 0; rep < 100; ++rep) {
        Vec a = rng.uniform_vec(3, -1.5, 1.5);
        Vec b = rng.uniform_vec(3, -1.5, 1.5);
        Vec pa = project_onto_polytope(a, p);
        Vec pb = project_onto_polytope(b, p);
        REQUIRE(dist(project_onto_polytope(pa, p), pa) <= 1e-9);
        REQUIRE(dist(pa, pb) <= dist(a, b) + 1e-9);
    }
}

TEST_CASE("projection: infeasible polytope raises") {
    Polytope p(1);
    p.add_facet({1.0}, 0.0);    // x <= 0
    p.add_facet({-1.0}, 1.0);   // x >= 1
    REQUIRE_THROWS_AS(project_onto_polytope({0.5}, p), DomainEmpty);
}

TEST_CASE("hull projection returns convex weights") {
    Rng rng(9);
    std::vector<Vec> pts = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.4, 0.4}};
    for (int rep = 0; rep < 100; ++rep) {
        Vec z = rng.uniform_vec(2, -1.0, 2.0);
        auto hp = project_onto_hull(z, pts);
        double sum = 0.0;
        Vec recon(2, 0.0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            REQUIRE(hp.weights[i] >= -1e-12);
            sum += hp.weights[i];
            axpy(recon, hp.weights[i], pts[i]);
        }
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
        REQUIRE(dist(recon, hp.point) <= 1e-9);
        for (const auto& v : pts) REQUIRE(dot(sub(z, hp.point), sub(v, hp.point)) <= 1e-8);
    }
}

TEST_CASE("polytope: unit square vertices") {
    Polytope p = Polytope::box({0.0, 0.0}, {1.0, 1.0});
    auto vs = p.vertices();
    REQUIRE(vs.size() == 4);
    REQUIRE(p.full_dimensional());
    REQUIRE(p.interior()->margin > 0.4);
}

TEST_CASE("polytope: redundant facet removal") {
    Polytope p = Polytope::box({0.0, 0.0}, {1.0, 1.0});
    p.add_facet({1.0, 0.0}, -5.0);  // x <= 5, never tight
    REQUIRE(p.without_redundant().facets().size() == 4);
}

TEST_CASE("chart: drop-first simplex coordinates round-trip") {
    Chart c = Chart::simplex(3);
    Vec y = {0.2, 0.5, 0.3};
    Vec t = c.to_chart(y);
    REQUIRE(t.size() == 2);
    REQUIRE(dist(c.to_ambient(t), y) <= 1e-15);
}

TEST_CASE("chart: orthonormal flag chart preserves in-plane distances") {
    Rng rng(10);
    std::vector<Vec> pts = {{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}};
    Chart c = Chart::orthonormal(pts);
    REQUIRE(c.dim() == 2);
    for (int rep = 0; rep < 50; ++rep) {
        Vec w1 = rng.simplex_point(3), w2 = rng.simplex_point(3);
        Vec a(4, 0.0), b(4, 0.0);
        for (int i = 0; i < 3; ++i) {
            axpy(a, w1[i], pts[i]);
            axpy(b, w2[i], pts[i]);
        }
        REQUIRE_THAT(dist(c.to_chart(a), c.to_chart(b)), Catch::Matchers::WithinAbs(dist(a, b), 1e-10));
        REQUIRE(dist(c.to_ambient(c.to_chart(a)), a) <= 1e-10);
    }
}

TEST_CASE("hull_to_hrep: triangle and segment") {
    std::vector<Vec> tri = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.25, 0.25}};
    Polytope p = hull_to_hrep(tri, 2);
    REQUIRE(p.contains({0.3, 0.3}, 1e-9));
    REQUIRE(!p.contains({0.7, 0.7}, 1e-9));
    REQUIRE(p.facets().size() == 3);

    std::vector<Vec> seg = {{0.25}, {0.75}, {0.5}};
    Polytope q = hull_to_hrep(seg, 1);
    REQUIRE(q.contains({0.6}));
    REQUIRE(!q.contains({0.9}));
}
