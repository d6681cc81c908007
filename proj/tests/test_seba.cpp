#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ctk/seba.hpp"

using namespace ctk;

static const double PI = 3.14159265358979323846;

TEST_CASE("soft threshold: sign-preserving shrinkage, monotone in a") {
    Eigen::VectorXd f(5);
    f << -2.0, -0.5, 0.0, 0.3, 1.5;
    Eigen::VectorXd t = soft_threshold(f, 0.4);
    CHECK(t[0] == doctest::Approx(-1.6));
    CHECK(t[1] == doctest::Approx(-0.1));
    CHECK(t[2] == 0.0);
    CHECK(t[3] == 0.0);
    CHECK(t[4] == doctest::Approx(1.1));

    double prev_norm = soft_threshold(f, 0.0).norm();
    int prev_supp = 5;
    for (double a : {0.2, 0.4, 0.6, 1.6, 2.5}) {
        Eigen::VectorXd g = soft_threshold(f, a);
        CHECK(g.norm() <= prev_norm + 1e-15);
        int supp = 0;
        for (int i = 0; i < 5; ++i)
            if (g[i] != 0) ++supp;
        CHECK(supp <= prev_supp);
        prev_norm = g.norm();
        prev_supp = supp;
    }
    CHECK(soft_threshold(f, 2.5).norm() == 0.0);
    CHECK_THROWS_AS(soft_threshold(f, -1.0), ConfigError);
}

TEST_CASE("min_disjoint_threshold on hand-built combinations") {
    Eigen::MatrixXd F(4, 2);
    // overlap at row 1 until a > 0.3 (the smaller magnitude there)
    F << 1.0, 0.0, 0.6, 0.3, 0.0, 1.0, 0.0, 0.8;
    double a = min_disjoint_threshold(F);
    CHECK(a == doctest::Approx(0.3).epsilon(1e-3));

    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.9, 0.8, 0.7; // column 2 dominated everywhere
    CHECK_THROWS_AS(min_disjoint_threshold(bad), NumericalError);
}

TEST_CASE("rotation of the leading interval eigenfunctions matches the reference") {
    WeightedGrid wg = build_grid(GridKind::Interval, {1025}, {PI});
    DiscreteOperator op = assemble(wg.grid, wg.metric, wg.weight, BC::Dirichlet);
    SpectralBasis basis = smallest_eigenpairs(op, 3);
    SebaRotation rot = seba_rotate(wg.grid, basis.eigenvectors.leftCols(3), 3);
    CHECK(rot.converged);
    REQUIRE(rot.alpha.rows() == 3);

    // reference matrix (rows ordered by support centroid along x)
    Eigen::MatrixXd ref(3, 3);
    ref << 0.45, 0.71, 0.54, 0.77, 0.0, -0.64, 0.45, -0.71, 0.54;
    CHECK((rot.alpha - ref).lpNorm<Eigen::Infinity>() < 0.02);

    // rows orthonormal
    Eigen::MatrixXd G = rot.alpha * rot.alpha.transpose();
    CHECK((G - Eigen::MatrixXd::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("certified threshold bound on the interval") {
    WeightedGrid wg = build_grid(GridKind::Interval, {1025}, {PI});
    DiscreteOperator op = assemble(wg.grid, wg.metric, wg.weight, BC::Dirichlet);
    SpectralBasis basis = smallest_eigenpairs(op, 3);
    SebaRotation rot = seba_rotate(wg.grid, basis.eigenvectors.leftCols(3), 3);
    Eigen::MatrixXd combos =
        sup_normalized(basis.eigenvectors.leftCols(3)) * rot.alpha.transpose();
    double a = min_disjoint_threshold(combos);
    CHECK(a == doctest::Approx(0.8373).epsilon(0.015));

    SebaCertificate cert = seba_certify(wg.grid, wg.metric, wg.weight, basis, rot.alpha, a,
                                        BC::Dirichlet, 512);
    CHECK(cert.bound_ok);
    CHECK(cert.ratio_bound == doctest::Approx(7.3).epsilon(0.02));
    CHECK(cert.norm_ratio_bound >= cert.ratio_bound); // the cruder norm bound
    // lambda_3 <= -J^2/4 * retention certificate re-check
    double lam3 = basis.eigenvalues[2];
    double max_ret = *std::max_element(cert.retention.begin(), cert.retention.end());
    CHECK(lam3 <= -0.25 * cert.packing.max_ratio * cert.packing.max_ratio * max_ret + 1e-8);

    std::vector<double> ends = cert.level_end;
    std::sort(ends.begin(), ends.end());
    CHECK(ends.front() == doctest::Approx(0.51).epsilon(0.025));
    CHECK(ends.back() == doctest::Approx(0.55).epsilon(0.025));
}

TEST_CASE("certificate rejects a threshold leaving overlapping supports") {
    WeightedGrid wg = build_grid(GridKind::Interval, {257}, {PI});
    DiscreteOperator op = assemble(wg.grid, wg.metric, wg.weight, BC::Dirichlet);
    SpectralBasis basis = smallest_eigenpairs(op, 3);
    SebaRotation rot = seba_rotate(wg.grid, basis.eigenvectors.leftCols(3), 3);
    CHECK_THROWS_AS(seba_certify(wg.grid, wg.metric, wg.weight, basis, rot.alpha, 0.01,
                                 BC::Dirichlet, 128),
                    NumericalError);
}
