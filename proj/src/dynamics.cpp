#include "ctk/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace ctk {

FlowMap shear_flow(double b, int t_max) {
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    FlowMap fm;
    fm.t_count = t_max;
    fm.map = [b, t_max](int j, double x, double y) -> std::array<double, 2> {
        double frac = t_max == 1 ? 0.0 : static_cast<double>(j) / (t_max - 1);
        return {x + b * frac * y, y};
    };
    fm.jac = [b, t_max](int j, double, double) -> std::array<double, 4> {
        double frac = t_max == 1 ? 0.0 : static_cast<double>(j) / (t_max - 1);
        return {1.0, b * frac, 0.0, 1.0};
    };
    return fm;
}

FlowMap identity_flow(int t_max) { return shear_flow(0.0, t_max); }

MetricField mixing_metric(const FlowMap& flow, const Grid& grid) {
    MetricField m;
    m.g11.resize(grid.ncell());
    m.g12.resize(grid.ncell());
    m.g22.resize(grid.ncell());
    const double hx = grid.hx(), hy = grid.hy();
    for (int cy = 0; cy < grid.ncy(); ++cy)
        for (int cx = 0; cx < grid.ncx(); ++cx) {
            const double x = grid.xcoord(cx) + 0.5 * hx;
            const double y = grid.ycoord(cy) + 0.5 * hy;
            Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
            for (int j = 0; j < flow.t_count; ++j) {
                auto J = flow.jac(j, x, y);
                Eigen::Matrix2d D;
                D << J[0], J[1], J[2], J[3];
                Eigen::Matrix2d C = D.transpose() * D; // pullback of Euclidean g_t
                acc += C.inverse();
            }
            acc /= flow.t_count;
            Eigen::Matrix2d gbar = acc.inverse();
            const int c = grid.cid(cx, cy);
            m.g11[c] = gbar(0, 0);
            m.g12[c] = 0.5 * (gbar(0, 1) + gbar(1, 0));
            m.g22[c] = gbar(1, 1);
            if (!(m.g11[c] > 0) || !(m.det(c, 2) > 0))
                throw NumericalError("mixing metric not positive definite");
        }
    return m;
}

DiscreteOperator assemble_dynamic(const Grid& grid, const MetricField& metric_g0,
                                  const WeightField& weight, const FlowMap& flow, BC bc) {
    if (grid.dim != 2) throw ConfigError("dynamic assembly requires dim 2");
    if (flow.t_count < 1) throw ConfigError("empty time index set");
    MetricField gbar = mixing_metric(flow, grid);
    std::vector<double> scale(grid.ncell());
    for (int c = 0; c < grid.ncell(); ++c)
        scale[c] = std::sqrt(metric_g0.det(c, 2)) / std::sqrt(gbar.det(c, 2));
    return assemble(grid, gbar, weight, bc, &scale);
}

namespace {

// Adaptive advected length of one straight M0 segment at one slice.
double advect_segment_length(const FlowMap& flow, int slice, double x0, double y0,
                             double x1, double y1, double tol) {
    struct Piece {
        double ax, ay, bx, by; // M0 endpoints
        std::array<double, 2> fa, fb;
        int depth;
    };
    auto img = [&](double x, double y) { return flow.map(slice, x, y); };
    std::vector<Piece> stack{{x0, y0, x1, y1, img(x0, y0), img(x1, y1), 0}};
    double total = 0.0;
    while (!stack.empty()) {
        Piece p = stack.back();
        stack.pop_back();
        const double mx = 0.5 * (p.ax + p.bx), my = 0.5 * (p.ay + p.by);
        auto fm = img(mx, my);
        const double cx = 0.5 * (p.fa[0] + p.fb[0]), cy = 0.5 * (p.fa[1] + p.fb[1]);
        const double dev = std::hypot(fm[0] - cx, fm[1] - cy);
        if (dev > tol && p.depth < 12) {
            stack.push_back({p.ax, p.ay, mx, my, p.fa, fm, p.depth + 1});
            stack.push_back({mx, my, p.bx, p.by, fm, p.fb, p.depth + 1});
        } else {
            total += std::hypot(p.fa[0] - fm[0], p.fa[1] - fm[1]) +
                     std::hypot(p.fb[0] - fm[0], p.fb[1] - fm[1]);
        }
    }
    return total;
}

} // namespace

double advected_length(const FlowMap& flow, int slice, const Grid& grid,
                       const std::vector<std::array<double, 4>>& segments) {
    const double cell = grid.dim == 1 ? grid.hx() : std::min(grid.hx(), grid.hy());
    const double tol = 1e-3 * cell;
    double total = 0.0;
    for (const auto& s : segments)
        total += advect_segment_length(flow, slice, s[0], s[1], s[2], s[3], tol);
    return total;
}

double dynamic_cheeger_ratio(const FlowMap& flow, const Grid& grid,
                             const std::vector<std::array<double, 4>>& boundary,
                             double region_measure) {
    if (!(region_measure > 0)) throw ConfigError("region measure must be > 0");
    double sum = 0.0;
    for (int j = 0; j < flow.t_count; ++j) sum += advected_length(flow, j, grid, boundary);
    return sum / flow.t_count / region_measure;
}

SweepResult dynamic_sweep(const Grid& grid, const MetricField& metric,
                          const WeightField& weight, const FlowMap& flow,
                          const Eigen::VectorXd& u, const NodalDomain& domain,
                          double lambda, BC mode, int n_levels) {
    PerimeterOverride po = [&flow, &grid](const std::vector<std::array<double, 4>>& segs) {
        double sum = 0.0;
        for (int j = 0; j < flow.t_count; ++j) sum += advected_length(flow, j, grid, segs);
        return sum / flow.t_count;
    };
    return superlevel_sweep(grid, metric, weight, u, domain, lambda, mode, n_levels, po);
}

MixingBoundCheck check_mixing_bound(const FlowMap& flow, const Grid& grid,
                                    const std::vector<std::array<double, 4>>& boundary,
                                    double region_measure, double tol) {
    MixingBoundCheck out;
    out.j_dynamic = dynamic_cheeger_ratio(flow, grid, boundary, region_measure);

    MetricField gbar = mixing_metric(flow, grid);
    const double hx = grid.hx(), hy = grid.hy();
    auto cell_of = [&](double x, double y) {
        int cx = std::min(grid.ncx() - 1, std::max(0, static_cast<int>(x / hx)));
        int cy = std::min(grid.ncy() - 1, std::max(0, static_cast<int>(y / hy)));
        if (grid.per_x) cx = ((static_cast<int>(std::floor(x / hx)) % grid.ncx()) + grid.ncx()) % grid.ncx();
        if (grid.per_y) cy = ((static_cast<int>(std::floor(y / hy)) % grid.ncy()) + grid.ncy()) % grid.ncy();
        return grid.cid(cx, cy);
    };
    double len = 0.0;
    for (const auto& s : boundary) {
        const double mx = 0.5 * (s[0] + s[2]), my = 0.5 * (s[1] + s[3]);
        const int c = cell_of(mx, my);
        const double dx = s[2] - s[0], dy = s[3] - s[1];
        const double g11 = gbar.g11[c], g12 = gbar.g12[c], g22 = gbar.g22[c];
        const double glen =
            std::sqrt(dx * (g11 * dx + g12 * dy) + dy * (g12 * dx + g22 * dy));
        // boundary-measure weight e^{phibar} = sqrt(det g0)/sqrt(det gbar), g0 = I
        len += glen / std::sqrt(gbar.det(c, 2));
    }
    out.j_mixing_metric = len / region_measure;
    out.holds = out.j_dynamic <= out.j_mixing_metric + tol;
    return out;
}

} // namespace ctk
