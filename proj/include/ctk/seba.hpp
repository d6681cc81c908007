#pragma once
#include <Eigen/Dense>

#include "ctk/levelset.hpp"

namespace ctk {

// Pointwise sign(f) * max(|f| - a, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& f, double a);

struct SebaRotation {
    Eigen::MatrixXd alpha; // l x k, rows orthonormal
    int iterations = 0;
    bool converged = true;
};

// Sparsifying rotation of the leading l functions within the span of the
// first k eigenvectors (alternating soft-threshold / polar-factor iteration,
// deterministic identity initialization). Columns are made Euclidean-
// orthonormal internally via a thin QR. Rows are canonicalized: ordered by
// support centroid, signed so the max-magnitude entry of each combination is
// positive.
SebaRotation seba_rotate(const Grid& grid, const Eigen::MatrixXd& eigenvectors, int l,
                         int max_iter = 5000, double conv_tol = 1e-12);

// Smallest a (bisection to 1e-4 * max|f|) making the thresholded supports of
// the given combinations pairwise disjoint and all nonzero. Throws
// NumericalError if no such a exists.
double min_disjoint_threshold(const Eigen::MatrixXd& combinations);

struct SebaCertificate {
    Eigen::MatrixXd alpha;
    double a = 0.0;
    Eigen::MatrixXd combinations;       // f_{i,alpha}, per vertex (columns)
    Eigen::MatrixXd sparse_functions;   // tau_a(f_{i,alpha})
    std::vector<double> retention;      // ||tau f||^2 / ||f||^2 in L2(M;mu)
    std::vector<double> rayleigh;       // Rayleigh quotient of tau f on its G~
    std::vector<SweepResult> sweeps;    // per-i sweep of tau_a(f)^2 on G~
    std::vector<double> level_end;      // sqrt of the admissible s endpoint
    Packing packing;                    // the l-packing A_l
    double ratio_bound = 0.0;           // max_i 2 sqrt(rayleigh_i)
    double norm_ratio_bound = 0.0;      // 2 sqrt(-lambda_k) max_j ||f||/||tau f||
    bool bound_ok = false;              // lambda_k <= -J(A_l)^2/4 * max retention
};

// Certify Proposition-style bounds for the thresholded combinations: selects
// per-i the nodal domain minimizing the Rayleigh quotient of tau_a(f_i),
// sweeps its superlevel sets with admissibility threshold 2 sqrt(rayleigh_i),
// and assembles the l-packing with certificate values. Combinations are built
// from sup-normalized eigenfunctions. Throws NumericalError on certificate
// violation or empty S~ at resolution.
SebaCertificate seba_certify(const Grid& grid, const MetricField& metric,
                             const WeightField& weight, const SpectralBasis& basis,
                             const Eigen::MatrixXd& alpha, double a, BC mode,
                             int n_levels = 256,
                             LevelSelection selection = LevelSelection::MinRatio);

// Rescale each column to unit sup norm with a deterministic sign (the first
// entry reaching half the sup norm is made positive). This is the
// normalization used for the
// combinations and thresholds throughout the pipeline; seba_rotate applies it
// internally, so alpha composes with sup_normalized(eigenvectors).
Eigen::MatrixXd sup_normalized(const Eigen::MatrixXd& vectors);

} // namespace ctk
