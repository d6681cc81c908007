#pragma once
#include <Eigen/Sparse>
#include <vector>

#include "ctk/grid.hpp"

namespace ctk {

enum class BC { Neumann, Dirichlet };

BC bc_from_string(const std::string& s);
std::string to_string(BC bc);

// Discrete weighted Laplace-Beltrami pair: K u = -lambda B u with K symmetric
// PSD (stiffness) and B SPD (consistent mass), restricted to the free vertices
// (all vertices for Neumann, interior vertices for Dirichlet).
struct DiscreteOperator {
    Eigen::SparseMatrix<double> stiffness; // free x free
    Eigen::SparseMatrix<double> mass;      // free x free
    BC bc = BC::Neumann;
    std::vector<int> free_vertices;  // free dof index -> vertex id
    std::vector<int> vertex_to_free; // vertex id -> free dof index or -1
    int nvert = 0;

    // Expand a free-dof vector to all vertices (zero on eliminated boundary).
    Eigen::VectorXd prolong(const Eigen::VectorXd& u_free) const;
    // Restrict a per-vertex vector to the free dofs.
    Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& u_full) const;
};

// P1 finite elements: segments in dim 1, triangulated quad cells in dim 2
// (fixed diagonal v00-v11). Stiffness integrand e^phi sqrt(det g) g^{-1},
// consistent mass integrand e^phi sqrt(det g), with e^phi and the optional
// per-cell density scale treated as cell constants (vertex-averaged e^phi).
// `cell_density_scale` multiplies both integrands per cell (used by the
// dynamic Laplacian, where it carries sqrt(det g0)/sqrt(det gbar)).
DiscreteOperator assemble(const Grid& grid, const MetricField& metric,
                          const WeightField& weight, BC bc,
                          const std::vector<double>* cell_density_scale = nullptr);

// Write the operator in coordinate text format (row col value) for debugging.
void export_coo(const Eigen::SparseMatrix<double>& m, const std::string& path);

} // namespace ctk
