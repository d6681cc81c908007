#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctk/levelset.hpp"

using namespace ctk;

static const double PI = 3.14159265358979323846;

TEST_CASE("sweep of sin(x) on [0,pi]: admissible levels end near 0.772") {
    WeightedGrid wg = build_grid(GridKind::Interval, {1025}, {PI});
    Eigen::VectorXd u(wg.grid.nvert());
    for (int v = 0; v < wg.grid.nvert(); ++v) u[v] = std::sin(wg.grid.xcoord(v));
    NodalDecomposition dec = nodal_domains(wg.grid, u);
    REQUIRE(dec.domains.size() == 1);
    SweepResult sw = superlevel_sweep(wg.grid, wg.metric, wg.weight, u, dec.domains[0],
                                      -1.0, BC::Dirichlet, 512);
    CHECK(sw.s_admissible_end == doctest::Approx(0.7718).epsilon(0.01));
    CHECK(sw.smeasure_estimate >= sw.smeasure_lower_bound - 1e-12);
    CHECK(sw.smeasure_estimate > 0.0);
    // G = (0,pi): mu(G) = pi, ||u||^2 = pi/2
    CHECK(sw.mu_G == doctest::Approx(PI).epsilon(1e-4));
    CHECK(sw.norm_u2 == doctest::Approx(PI / 2).epsilon(1e-4));
}

TEST_CASE("sweep of the cos(x) band on the torus ends near cos^2(1/2)") {
    WeightedGrid wg = build_grid(GridKind::Torus, {128, 32}, {2 * PI, 2 * PI});
    Eigen::VectorXd u(wg.grid.nvert());
    for (int v = 0; v < wg.grid.nvert(); ++v)
        u[v] = std::cos(wg.grid.xcoord(v % wg.grid.nx));
    NodalDecomposition dec = nodal_domains(wg.grid, u);
    REQUIRE(dec.domains.size() == 2);
    int pos = dec.domains[0].sign > 0 ? 0 : 1;
    SweepResult sw = superlevel_sweep(wg.grid, wg.metric, wg.weight, u, dec.domains[pos],
                                      -1.0, BC::Neumann, 512);
    const double target = std::cos(0.5) * std::cos(0.5); // 0.770151
    CHECK(sw.s_admissible_end == doctest::Approx(target).epsilon(0.013));
    CHECK(sw.smeasure_estimate >= sw.smeasure_lower_bound - 1e-12);
}

TEST_CASE("level geometry of a linear ramp is exact") {
    // u = x on the unit square, domain = everything, level s: {x > sqrt(s)}
    WeightedGrid wg = build_grid(GridKind::Rectangle, {33, 33}, {1.0, 1.0});
    Eigen::VectorXd u(wg.grid.nvert());
    for (int v = 0; v < wg.grid.nvert(); ++v) u[v] = wg.grid.xcoord(v % wg.grid.nx) + 0.5;
    NodalDecomposition dec = nodal_domains(wg.grid, u);
    REQUIRE(dec.domains.size() == 1);
    const double s = 1.21; // u > 1.1, i.e. x > 0.6 (not a grid line)
    LevelGeometry geo = superlevel_geometry(wg.grid, wg.metric, wg.weight, u,
                                            dec.domains[0], s);
    CHECK(geo.volume == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(geo.interior_perimeter == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(geo.touches_boundary);
}

TEST_CASE("interface perimeter of a circle converges at second order") {
    // u = 1.5 - ((x-c)^2 + (y-c)^2): superlevel set at s is a disc
    const double s = 0.25; // radius sqrt(1.5 - 0.5) = 1
    auto perimeter_err = [&](int n) {
        WeightedGrid wg = build_grid(GridKind::Rectangle, {n, n}, {4.0, 4.0});
        Eigen::VectorXd u(wg.grid.nvert());
        for (int v = 0; v < wg.grid.nvert(); ++v) {
            double dx = wg.grid.xcoord(v % wg.grid.nx) - 2.0;
            double dy = wg.grid.ycoord(v / wg.grid.nx) - 2.0;
            u[v] = 1.5 - (dx * dx + dy * dy);
        }
        NodalDecomposition dec = nodal_domains(wg.grid, u);
        int pos = -1;
        for (size_t i = 0; i < dec.domains.size(); ++i)
            if (dec.domains[i].sign > 0) pos = static_cast<int>(i);
        REQUIRE(pos >= 0);
        LevelGeometry geo = superlevel_geometry(wg.grid, wg.metric, wg.weight, u,
                                                dec.domains[pos], s);
        return std::abs(geo.interior_perimeter - 2 * PI);
    };
    double e1 = perimeter_err(41);
    double e2 = perimeter_err(81);
    double e3 = perimeter_err(161);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    CHECK(e1 / e3 > 8.0); // two halvings of h: O(h^2) predicts ~16x
}

TEST_CASE("coarea consistency: total variation equals the perimeter integral") {
    WeightedGrid wg = build_grid(GridKind::Interval, {2049}, {PI});
    Eigen::VectorXd u(wg.grid.nvert());
    for (int v = 0; v < wg.grid.nvert(); ++v) u[v] = std::sin(wg.grid.xcoord(v));
    NodalDecomposition dec = nodal_domains(wg.grid, u);
    SweepResult sw = superlevel_sweep(wg.grid, wg.metric, wg.weight, u, dec.domains[0],
                                      -1.0, BC::Dirichlet, 1024);
    double lhs = weighted_total_variation_u2(wg.grid, wg.metric, wg.weight, u,
                                             dec.domains[0]);
    // integral of perimeter(s) ds recovered from hbar * ||u||^2
    double rhs = sw.hbar * sw.norm_u2;
    CHECK(lhs == doctest::Approx(rhs).epsilon(0.05));
}

TEST_CASE("packing certificate on the interval") {
    WeightedGrid wg = build_grid(GridKind::Interval, {513}, {PI});
    DiscreteOperator op = assemble(wg.grid, wg.metric, wg.weight, BC::Dirichlet);
    SpectralBasis basis = smallest_eigenpairs(op, 4);
    for (int k = 2; k <= 4; ++k) {
        Packing p = build_packing(wg.grid, wg.metric, wg.weight, basis, k, BC::Dirichlet);
        CHECK(p.r_k == k); // sin(kx) has k nodal domains
        CHECK(static_cast<int>(p.sets.size()) == p.r_k);
        CHECK(p.certificate_ok);
        CHECK(p.max_ratio <= 2 * std::sqrt(-basis.eigenvalues[k - 1]) + 1e-9);
        // pairwise disjoint vertex sets
        std::vector<char> seen(wg.grid.nvert(), 0);
        for (const auto& s : p.sets)
            for (int v : s.vertices) {
                CHECK(!seen[v]);
                seen[v] = 1;
            }
    }
}

TEST_CASE("k=1 Neumann packing is the whole manifold with ratio zero") {
    WeightedGrid wg = build_grid(GridKind::Torus, {24, 24}, {2 * PI, 2 * PI});
    DiscreteOperator op = assemble(wg.grid, wg.metric, wg.weight, BC::Neumann);
    SpectralBasis basis = smallest_eigenpairs(op, 1);
    Packing p = build_packing(wg.grid, wg.metric, wg.weight, basis, 1, BC::Neumann);
    REQUIRE(p.sets.size() == 1);
    CHECK(p.sets[0].ratio == 0.0);
    CHECK(p.sets[0].vertices.size() == static_cast<size_t>(wg.grid.nvert()));
    CHECK(p.certificate_ok);
}
