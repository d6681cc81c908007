#pragma once
#include <Eigen/Dense>
#include <array>
#include <functional>

#include "ctk/assembly.hpp"
#include "ctk/eigensolve.hpp"
#include "ctk/grid.hpp"
#include "ctk/nodal.hpp"

namespace ctk {

// Sub-cell geometry of the superlevel set G_s = {u^2 > s} within one nodal
// domain: exact clipping of the piecewise-linear interpolant per triangle
// (per segment in dim 1). Segments are (x0,y0,x1,y1) in global coordinates.
struct LevelGeometry {
    double volume = 0.0;            // mu(G_s)
    double u2mass = 0.0;            // int_{G_s} u^2 dmu
    double interior_perimeter = 0;  // weighted length of the u^2 = s interface
    double boundary_perimeter = 0;  // weighted length of dG_s lying in dM
    bool touches_boundary = false;  // closure of G_s meets dM
    std::vector<std::array<double, 4>> segments; // interface pieces
    std::vector<int> vertices_inside;            // domain vertices with u^2 > s
};

LevelGeometry superlevel_geometry(const Grid& grid, const MetricField& metric,
                                  const WeightField& weight, const Eigen::VectorXd& u,
                                  const NodalDomain& domain, double s);

struct SweepRecord {
    double s = 0.0;
    double volume = 0.0;
    double perimeter = 0.0; // Neumann: interface only; Dirichlet: + dM portion
    double ratio = 0.0;
    bool admissible = false;
    bool touches_boundary = false;
};

struct SweepResult {
    std::vector<SweepRecord> records; // increasing s, starting at s = 0
    double lambda = 0.0;              // eigenvalue used for admissibility
    double s_max = 0.0;               // max u^2 on the domain
    double norm_u2 = 0.0;             // ||u||^2_{L2(G;mu)}
    double mu_G = 0.0;                // mu(G)
    double hbar = 0.0;                // weighted-average ratio
    double inf_ratio = 0.0;
    double smeasure_estimate = 0.0;   // measured Leb(S_G) (refined endpoints)
    double smeasure_lower_bound = 0.0;
    bool degenerate_bound = false;    // constant ratio profile
    double s_admissible_end = 0.0;    // largest admissible level (refined)
};

// Replace the static interface perimeter by a custom evaluator (used by the
// dynamic sweep: time-averaged advected length of the same segments).
using PerimeterOverride = std::function<double(const std::vector<std::array<double, 4>>&)>;

// Sweep superlevel sets of u^2 on one nodal domain over an s-grid at quantiles
// of the vertex u^2 values. Admissible <=> ratio <= 2 sqrt(-lambda) (and, in
// Dirichlet mode, the closure of G_s avoids dM). Admissibility boundaries are
// refined by bisection; Leb(S_G) and the paper's lower bound are computed from
// the records.
SweepResult superlevel_sweep(const Grid& grid, const MetricField& metric,
                             const WeightField& weight, const Eigen::VectorXd& u,
                             const NodalDomain& domain, double lambda, BC mode,
                             int n_levels = 256,
                             const PerimeterOverride& perimeter_override = nullptr);

// The eq:Smeasure lower bound of a completed sweep.
double smeasure_bound(const SweepResult& sweep);

// int_G |grad(u^2)|_g dmu over the nodal domain (coarea-formula left side;
// used as a consistency oracle against int perimeter(s) ds).
double weighted_total_variation_u2(const Grid& grid, const MetricField& metric,
                                   const WeightField& weight, const Eigen::VectorXd& u,
                                   const NodalDomain& domain);

enum class LevelSelection { MinRatio, Midpoint };

struct PackedRegion {
    int domain_index = -1;
    double s = 0.0;
    double ratio = 0.0, volume = 0.0, perimeter = 0.0;
    std::vector<int> vertices;
    std::vector<std::array<double, 4>> boundary_segments;
};

struct Packing {
    std::vector<PackedRegion> sets;
    double max_ratio = 0.0;
    double lambda_k = 0.0;
    bool certificate_ok = false; // lambda_k <= -max_ratio^2/4
    int k = 0, r_k = 0, witness = -1;
};

// r_k disjoint superlevel regions from the witness eigenfunction's nodal
// domains, one level per domain chosen by the selection rule. Certificate
// failure or an empty S_G at this resolution throws NumericalError.
Packing build_packing(const Grid& grid, const MetricField& metric,
                      const WeightField& weight, const SpectralBasis& basis, int k,
                      BC mode, LevelSelection selection = LevelSelection::MinRatio,
                      int n_levels = 256);

} // namespace ctk
