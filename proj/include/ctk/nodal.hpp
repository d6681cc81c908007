#pragma once
#include <Eigen/Dense>

#include "ctk/eigensolve.hpp"
#include "ctk/grid.hpp"

namespace ctk {

struct NodalDomain {
    int sign = 0; // +1 or -1
    std::vector<int> vertices;
};

struct NodalDecomposition {
    std::vector<NodalDomain> domains;
    std::vector<int> zero_set; // vertices with |u| <= zero_tol
    double zero_tol = 0.0;
};

// Connected components of {u > zero_tol} and {u < -zero_tol} under edge
// adjacency (periodic wrap respected). zero_tol < 0 selects the default
// 1e-8 * max|u|. Throws NumericalError if u is entirely within tolerance of 0.
NodalDecomposition nodal_domains(const Grid& grid, const Eigen::VectorXd& u,
                                 double zero_tol = -1.0);

struct RkResult {
    int r_k = 0;
    int witness = -1; // index of the maximizing eigenfunction in the basis
};

// Maximum nodal-domain count over computed eigenfunctions with eigenvalue
// >= lambda_k (ties included), plus optional extra candidate vectors (e.g.
// user-supplied rotations within a degenerate eigenspace, each paired with its
// eigenvalue). Witness indices >= basis size refer to the extras in order.
RkResult r_k_from_basis(const Grid& grid, const SpectralBasis& basis, int k,
                        const std::vector<std::pair<double, Eigen::VectorXd>>& extras = {});

} // namespace ctk
