#pragma once
#include <array>
#include <functional>

#include "ctk/levelset.hpp"

namespace ctk {

// Time-indexed family of diffeomorphisms on the grid domain. t_max is the
// NUMBER of time slices: slice j in {0,...,t_max-1} corresponds to time
// fraction j/(t_max-1) (a single slice is the identity family). Maps are
// supplied analytically; images may be given in unwrapped coordinates (the
// universal cover) so advected lengths are well defined on periodic domains.
struct FlowMap {
    int t_count = 1; // |T|, the number of time slices
    std::function<std::array<double, 2>(int, double, double)> map; // (slice, x, y) -> point
    std::function<std::array<double, 4>(int, double, double)> jac; // row-major 2x2
};

// Linear shear on the cylinder: slice j maps (x,y) -> (x + b*frac_j*y, y) with
// frac_j = j/(t_max-1); Jacobian [[1, b*frac_j],[0,1]] (measure-preserving).
FlowMap shear_flow(double b, int t_max);

// Identity family with the given number of slices.
FlowMap identity_flow(int t_max);

// Geometry-of-mixing metric: per cell, gbar^{-1} = mean_j (DPhi^T DPhi)^{-1}
// at the cell center, then inverted (time-slice metrics are Euclidean).
MetricField mixing_metric(const FlowMap& flow, const Grid& grid);

// Dynamic Laplacian Delta_{gbar, mu0}: assembled with metric gbar and the
// static weight, with the per-cell density scale sqrt(det g0)/sqrt(det gbar)
// so that the mass matrix equals the static one exactly.
DiscreteOperator assemble_dynamic(const Grid& grid, const MetricField& metric_g0,
                                  const WeightField& weight, const FlowMap& flow, BC bc);

// Length of the advected polyline pieces at one time slice, with adaptive
// midpoint refinement (deviation tolerance 1e-3 * cell size, up to 12
// doublings). Segments are in M0 coordinates (time-slice metrics Euclidean,
// weights uniform).
double advected_length(const FlowMap& flow, int slice, const Grid& grid,
                       const std::vector<std::array<double, 4>>& segments);

// Time-averaged advected boundary length / mu0(region).
double dynamic_cheeger_ratio(const FlowMap& flow, const Grid& grid,
                             const std::vector<std::array<double, 4>>& boundary,
                             double region_measure);

// Superlevel sweep with the dynamic Cheeger ratio as the per-level ratio.
SweepResult dynamic_sweep(const Grid& grid, const MetricField& metric,
                          const WeightField& weight, const FlowMap& flow,
                          const Eigen::VectorXd& u, const NodalDomain& domain,
                          double lambda, BC mode, int n_levels = 256);

struct MixingBoundCheck {
    double j_dynamic = 0.0;       // advection-based ratio
    double j_mixing_metric = 0.0; // ratio under (gbar, mu0)
    bool holds = false;           // j_dynamic <= j_mixing_metric + tol
};

// Verify the upper bound J^d(A) <= J(A; gbar, mu0), both sides computed
// independently (advection vs gbar arc length with weight
// e^{phibar} = sqrt(det g0)/sqrt(det gbar)).
MixingBoundCheck check_mixing_bound(const FlowMap& flow, const Grid& grid,
                                    const std::vector<std::array<double, 4>>& boundary,
                                    double region_measure, double tol = 1e-3);

} // namespace ctk
