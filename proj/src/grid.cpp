#include "ctk/grid.hpp"

#include <cmath>

#include "ctk/expr.hpp"

namespace ctk {

GridKind grid_kind_from_string(const std::string& s) {
    if (s == "interval") return GridKind::Interval;
    if (s == "rectangle") return GridKind::Rectangle;
    if (s == "torus") return GridKind::Torus;
    if (s == "cylinder") return GridKind::Cylinder;
    throw ConfigError("unknown grid kind '" + s + "'");
}

std::string to_string(GridKind k) {
    switch (k) {
    case GridKind::Interval: return "interval";
    case GridKind::Rectangle: return "rectangle";
    case GridKind::Torus: return "torus";
    case GridKind::Cylinder: return "cylinder";
    }
    return "?";
}

std::array<int, 4> Grid::cell_verts(int cx, int cy) const {
    int x1 = cx + 1, y1 = cy + 1;
    if (per_x && x1 == nx) x1 = 0;
    if (per_y && y1 == ny) y1 = 0;
    if (dim == 1) return {vid(cx, 0), vid(x1, 0), -1, -1};
    return {vid(cx, cy), vid(x1, cy), vid(cx, y1), vid(x1, y1)};
}

int Grid::neighbors(int v, int out[4]) const {
    int ix = v % nx, iy = v / nx;
    int n = 0;
    auto push_x = [&](int jx) { out[n++] = vid(jx, iy); };
    if (ix > 0) push_x(ix - 1);
    else if (per_x) push_x(nx - 1);
    if (ix < nx - 1) push_x(ix + 1);
    else if (per_x) push_x(0);
    if (dim == 2) {
        auto push_y = [&](int jy) { out[n++] = vid(ix, jy); };
        if (iy > 0) push_y(iy - 1);
        else if (per_y) push_y(ny - 1);
        if (iy < ny - 1) push_y(iy + 1);
        else if (per_y) push_y(0);
    }
    return n;
}

MetricField euclidean_metric(const Grid& g) {
    MetricField m;
    m.g11.assign(g.ncell(), 1.0);
    if (g.dim == 2) {
        m.g12.assign(g.ncell(), 0.0);
        m.g22.assign(g.ncell(), 1.0);
    }
    return m;
}

WeightedGrid build_grid(GridKind kind, const std::vector<int>& resolution,
                        const std::vector<double>& extent,
                        const std::string& phi_spec) {
    const int dim = (kind == GridKind::Interval) ? 1 : 2;
    if (static_cast<int>(resolution.size()) != dim)
        throw ConfigError("resolution must have " + std::to_string(dim) + " entries");
    if (static_cast<int>(extent.size()) != dim)
        throw ConfigError("extent must have " + std::to_string(dim) + " entries");
    for (int r : resolution)
        if (r < 2) throw ConfigError("resolution must be >= 2 per axis");
    for (double e : extent)
        if (!(e > 0)) throw ConfigError("extent must be > 0 per axis");

    WeightedGrid wg;
    Grid& g = wg.grid;
    g.dim = dim;
    g.nx = resolution[0];
    g.lx = extent[0];
    if (dim == 2) {
        g.ny = resolution[1];
        g.ly = extent[1];
    }
    switch (kind) {
    case GridKind::Interval:
    case GridKind::Rectangle: break;
    case GridKind::Torus: g.per_x = g.per_y = true; break;
    case GridKind::Cylinder: g.per_x = true; break; // periodic in x, walls at y extremes
    }

    g.is_boundary.assign(g.nvert(), 0);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            bool b = false;
            if (!g.per_x && (ix == 0 || ix == g.nx - 1)) b = true;
            if (dim == 2 && !g.per_y && (iy == 0 || iy == g.ny - 1)) b = true;
            if (b) g.is_boundary[g.vid(ix, iy)] = 1;
        }

    wg.metric = euclidean_metric(g);

    wg.weight.phi.assign(g.nvert(), 0.0);
    if (!phi_spec.empty()) {
        Expr e = [&] {
            try {
                return Expr::parse(phi_spec);
            } catch (const ExprError& err) {
                throw ConfigError(std::string("malformed phi expression: ") + err.what());
            }
        }();
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                double v = e.eval(g.xcoord(ix), g.ycoord(iy));
                if (!std::isfinite(v)) throw ConfigError("phi not finite at a vertex");
                wg.weight.phi[g.vid(ix, iy)] = v;
            }
    }
    return wg;
}

double measure_of_vertex_region(const Grid& g, const MetricField& metric,
                                const WeightField& weight,
                                const std::vector<int>& vertex_subset) {
    if (vertex_subset.empty()) throw ConfigError("empty vertex subset");
    std::vector<std::uint8_t> in(g.nvert(), 0);
    for (int v : vertex_subset) in[v] = 1;

    const double cell_vol = g.dim == 1 ? g.hx() : g.hx() * g.hy();
    const int nv = g.dim == 1 ? 2 : 4;
    double total = 0.0;
    for (int cy = 0; cy < g.ncy(); ++cy)
        for (int cx = 0; cx < g.ncx(); ++cx) {
            auto vs = g.cell_verts(cx, cy);
            int inside = 0;
            double wsum = 0.0;
            for (int i = 0; i < nv; ++i) {
                inside += in[vs[i]];
                wsum += std::exp(weight.phi[vs[i]]);
            }
            if (inside == 0) continue;
            int c = g.cid(cx, cy);
            total += cell_vol * std::sqrt(metric.det(c, g.dim)) * (wsum / nv) *
                     (static_cast<double>(inside) / nv);
        }
    return total;
}

} // namespace ctk
