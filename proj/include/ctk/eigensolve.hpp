#pragma once
#include <Eigen/Dense>

#include "ctk/assembly.hpp"

namespace ctk {

// Eigenpairs of K u = -lambda B u, ordered lambda_1 >= lambda_2 >= ... (all
// lambda <= 0, the paper's sign convention). Eigenvectors are per-vertex
// (prolonged with zeros on an eliminated Dirichlet boundary) and B-orthonormal.
struct SpectralBasis {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd eigenvectors; // nvert x count
    std::vector<double> residuals; // ||K u + lambda B u|| / ||B u|| per pair
    BC bc = BC::Neumann;
};

struct EigOptions {
    double tol = 1e-9;      // residual tolerance
    int max_iter = 500;     // iteration budget
    double shift = 0.1;     // shift-invert factorization shift sigma (K + sigma B)
    unsigned seed = 0;      // deterministic start block
};

// Blocked shift-invert subspace iteration with B-orthonormal Rayleigh-Ritz.
// Throws NumericalError on non-convergence (message reports achieved
// residuals) or ConfigError if count is out of range.
SpectralBasis smallest_eigenpairs(const DiscreteOperator& op, int count,
                                  const EigOptions& opts = {});

} // namespace ctk
