#include "ctk/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctk {

namespace {

// Clip {w > t} on one triangle of a linear interpolant. Polygon vertices are
// emitted in boundary order; crossing points (where w = t) are also reported.
struct TriClip {
    int np = 0;
    double px[5], py[5], wv[5], fv[5]; // polygon coords, w values, phi values
    int nc = 0;
    double cx[2][2]; // crossing points (x,y)
};

TriClip clip_triangle(const double x[3], const double y[3], const double w[3],
                      const double phi[3], double t) {
    TriClip r;
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3;
        if (w[i] > t) {
            r.px[r.np] = x[i];
            r.py[r.np] = y[i];
            r.wv[r.np] = w[i];
            r.fv[r.np] = phi[i];
            ++r.np;
        }
        double di = w[i] - t, dj = w[j] - t;
        if ((di > 0) != (dj > 0)) {
            double a = di / (di - dj);
            double cx = x[i] + a * (x[j] - x[i]);
            double cy = y[i] + a * (y[j] - y[i]);
            r.px[r.np] = cx;
            r.py[r.np] = cy;
            r.wv[r.np] = t;
            r.fv[r.np] = phi[i] + a * (phi[j] - phi[i]);
            ++r.np;
            if (r.nc < 2) {
                r.cx[r.nc][0] = cx;
                r.cx[r.nc][1] = cy;
                ++r.nc;
            }
        }
    }
    return r;
}

struct PolyIntegrals {
    double area = 0.0;
    double int_ephi = 0.0;    // int e^phi dA
    double int_w2ephi = 0.0;  // int w^2 e^phi dA
    double int_wephi = 0.0;   // int w e^phi dA
};

// Fan triangulation + 3-edge-midpoint quadrature (exact for quadratics in the
// linear fields; e^phi evaluated at the quadrature points).
PolyIntegrals polygon_integrals(const TriClip& c) {
    PolyIntegrals r;
    for (int i = 1; i + 1 < c.np; ++i) {
        int a = 0, b = i, d = i + 1;
        double A = 0.5 * ((c.px[b] - c.px[a]) * (c.py[d] - c.py[a]) -
                          (c.px[d] - c.px[a]) * (c.py[b] - c.py[a]));
        if (A <= 0) continue;
        int e1[3] = {a, b, d}, e2[3] = {b, d, a};
        double s_e = 0, s_w2 = 0, s_w = 0;
        for (int m = 0; m < 3; ++m) {
            double wm = 0.5 * (c.wv[e1[m]] + c.wv[e2[m]]);
            double fm = std::exp(0.5 * (c.fv[e1[m]] + c.fv[e2[m]]));
            s_e += fm;
            s_w2 += wm * wm * fm;
            s_w += wm * fm;
        }
        r.area += A;
        r.int_ephi += A / 3.0 * s_e;
        r.int_w2ephi += A / 3.0 * s_w2;
        r.int_wephi += A / 3.0 * s_w;
    }
    return r;
}

double metric_len(double dx, double dy, double g11, double g12, double g22) {
    return std::sqrt(dx * (g11 * dx + g12 * dy) + dy * (g12 * dx + g22 * dy));
}

struct ActiveCell {
    int cx, cy;
};

std::vector<ActiveCell> active_cells(const Grid& g, const std::vector<std::uint8_t>& in_dom) {
    std::vector<ActiveCell> out;
    const int nv = g.dim == 1 ? 2 : 4;
    for (int cy = 0; cy < g.ncy(); ++cy)
        for (int cx = 0; cx < g.ncx(); ++cx) {
            auto vs = g.cell_verts(cx, cy);
            for (int i = 0; i < nv; ++i)
                if (in_dom[vs[i]]) {
                    out.push_back({cx, cy});
                    break;
                }
        }
    return out;
}

} // namespace

LevelGeometry superlevel_geometry(const Grid& grid, const MetricField& metric,
                                  const WeightField& weight, const Eigen::VectorXd& u,
                                  const NodalDomain& domain, double s) {
    std::vector<std::uint8_t> in_dom(grid.nvert(), 0);
    for (int v : domain.vertices) in_dom[v] = 1;
    const double t = std::sqrt(std::max(0.0, s));
    const double sign = domain.sign;
    LevelGeometry out;

    for (int v : domain.vertices)
        if (sign * u[v] > t) out.vertices_inside.push_back(v);

    auto cells = active_cells(grid, in_dom);

    if (grid.dim == 1) {
        const double h = grid.hx();
        const double g = metric.g11.empty() ? 1.0 : metric.g11[0];
        for (auto [cx, cy] : cells) {
            auto vs = grid.cell_verts(cx, 0);
            const int a = vs[0], b = vs[1];
            double w0 = sign * u[a], w1 = sign * u[b];
            double f0 = weight.phi[a], f1 = weight.phi[b];
            const double x0 = grid.xcoord(cx);
            const double gc = metric.g11[grid.cid(cx, 0)];
            // sub-interval of [0,1] (local parameter) where w > t
            double lo = 0, hi = 1;
            if (w0 <= t && w1 <= t) { lo = hi = 0; }
            else if ((w0 > t) != (w1 > t)) {
                double a01 = (w0 - t) / (w0 - w1);
                if (w0 > t) hi = a01;
                else lo = a01;
                double xc = x0 + a01 * h;
                double fc = f0 + a01 * (f1 - f0);
                out.interior_perimeter += std::exp(fc); // weighted counting measure
                out.segments.push_back({xc, 0.0, xc, 0.0});
            }
            if (hi > lo) {
                double wm0 = w0 + lo * (w1 - w0), wm1 = w0 + hi * (w1 - w0);
                double fm0 = f0 + lo * (f1 - f0), fm1 = f0 + hi * (f1 - f0);
                double wmid = 0.5 * (wm0 + wm1), fmid = 0.5 * (fm0 + fm1);
                double L = (hi - lo) * h * std::sqrt(gc);
                // Simpson: exact for w^2 (quadratic), e^phi at the nodes
                out.volume += L / 6.0 *
                              (std::exp(fm0) + 4 * std::exp(fmid) + std::exp(fm1));
                out.u2mass += L / 6.0 *
                              (wm0 * wm0 * std::exp(fm0) + 4 * wmid * wmid * std::exp(fmid) +
                               wm1 * wm1 * std::exp(fm1));
                // does the closure reach a domain wall?
                if (!grid.per_x) {
                    if (cx == 0 && lo == 0 && w0 >= t) {
                        out.touches_boundary = true;
                        out.boundary_perimeter += std::exp(f0);
                    }
                    if (cx == grid.ncx() - 1 && hi == 1 && w1 >= t) {
                        out.touches_boundary = true;
                        out.boundary_perimeter += std::exp(f1);
                    }
                }
            }
        }
        (void)g;
        return out;
    }

    const double hx = grid.hx(), hy = grid.hy();
    for (auto [cx, cy] : cells) {
        const int c = grid.cid(cx, cy);
        auto vs = grid.cell_verts(cx, cy);
        const double g11 = metric.g11[c], g12 = metric.g12[c], g22 = metric.g22[c];
        const double sdet = std::sqrt(metric.det(c, 2));
        const double ox = grid.xcoord(cx), oy = grid.ycoord(cy);
        double wq[4], fq[4];
        for (int i = 0; i < 4; ++i) {
            wq[i] = sign * u[vs[i]];
            fq[i] = weight.phi[vs[i]];
        }
        // triangles (v00,v10,v11) and (v00,v11,v01), fixed diagonal
        const int tri[2][3] = {{0, 1, 3}, {0, 3, 2}};
        const double lx_[4] = {0, hx, 0, hx}, ly_[4] = {0, 0, hy, hy};
        for (const auto& T : tri) {
            double x[3], y[3], w[3], f[3];
            for (int i = 0; i < 3; ++i) {
                x[i] = ox + lx_[T[i]];
                y[i] = oy + ly_[T[i]];
                w[i] = wq[T[i]];
                f[i] = fq[T[i]];
            }
            if (w[0] <= t && w[1] <= t && w[2] <= t) continue;
            TriClip clip = clip_triangle(x, y, w, f, t);
            PolyIntegrals pi = polygon_integrals(clip);
            out.volume += sdet * pi.int_ephi;
            out.u2mass += sdet * pi.int_w2ephi;
            if (clip.nc == 2) {
                double dx = clip.cx[1][0] - clip.cx[0][0];
                double dy = clip.cx[1][1] - clip.cx[0][1];
                double len = metric_len(dx, dy, g11, g12, g22);
                if (len > 0) {
                    // phi at segment midpoint via the linear interpolant
                    double mx = 0.5 * (clip.cx[0][0] + clip.cx[1][0]) - x[0];
                    double my = 0.5 * (clip.cx[0][1] + clip.cx[1][1]) - y[0];
                    double det =
                        (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
                    double l1 = (mx * (y[2] - y[0]) - my * (x[2] - x[0])) / det;
                    double l2 = (my * (x[1] - x[0]) - mx * (y[1] - y[0])) / det;
                    double fm = f[0] + l1 * (f[1] - f[0]) + l2 * (f[2] - f[0]);
                    out.interior_perimeter += std::exp(fm) * len;
                    out.segments.push_back(
                        {clip.cx[0][0], clip.cx[0][1], clip.cx[1][0], clip.cx[1][1]});
                }
            }
        }
        // portions of dG_s lying on dM (cell edges on non-periodic extremes)
        auto boundary_edge = [&](int va, int vb, double ex0, double ey0, double ex1,
                                 double ey1) {
            double w0 = sign * u[va], w1 = sign * u[vb];
            if (w0 <= t && w1 <= t) return;
            double lo = 0, hi = 1;
            if ((w0 > t) != (w1 > t)) {
                double a01 = (w0 - t) / (w0 - w1);
                if (w0 > t) hi = a01;
                else lo = a01;
            }
            out.touches_boundary = true;
            double f0 = weight.phi[va], f1 = weight.phi[vb];
            double fm = f0 + 0.5 * (lo + hi) * (f1 - f0);
            double dx = (hi - lo) * (ex1 - ex0), dy = (hi - lo) * (ey1 - ey0);
            out.boundary_perimeter += std::exp(fm) * metric_len(dx, dy, g11, g12, g22);
        };
        if (!grid.per_y && cy == 0)
            boundary_edge(vs[0], vs[1], ox, oy, ox + hx, oy);
        if (!grid.per_y && cy == grid.ncy() - 1)
            boundary_edge(vs[2], vs[3], ox, oy + hy, ox + hx, oy + hy);
        if (!grid.per_x && cx == 0)
            boundary_edge(vs[0], vs[2], ox, oy, ox, oy + hy);
        if (!grid.per_x && cx == grid.ncx() - 1)
            boundary_edge(vs[1], vs[3], ox + hx, oy, ox + hx, oy + hy);
    }
    return out;
}

namespace {

SweepRecord make_record(const LevelGeometry& geo, double s, double lambda, BC mode,
                        const PerimeterOverride& po) {
    SweepRecord rec;
    rec.s = s;
    rec.volume = geo.volume;
    double interior = po ? po(geo.segments) : geo.interior_perimeter;
    rec.perimeter = interior + (mode == BC::Dirichlet ? geo.boundary_perimeter : 0.0);
    rec.touches_boundary = geo.touches_boundary;
    rec.ratio = geo.volume > 0 ? rec.perimeter / geo.volume :
                                 std::numeric_limits<double>::infinity();
    const double thr = 2.0 * std::sqrt(std::max(0.0, -lambda));
    rec.admissible = geo.volume > 0 && rec.ratio <= thr &&
                     !(mode == BC::Dirichlet && geo.touches_boundary);
    return rec;
}

} // namespace

SweepResult superlevel_sweep(const Grid& grid, const MetricField& metric,
                             const WeightField& weight, const Eigen::VectorXd& u,
                             const NodalDomain& domain, double lambda, BC mode,
                             int n_levels, const PerimeterOverride& perimeter_override) {
    if (n_levels < 16) throw ConfigError("n_levels must be >= 16");
    if (lambda > 1e-12) throw ConfigError("lambda must be <= 0");
    const int min_verts = grid.dim == 1 ? 2 : 4;
    if (static_cast<int>(domain.vertices.size()) < min_verts)
        throw NumericalError("nodal domain too small to resolve");

    // quantile s-grid from the vertex u^2 values on the domain
    std::vector<double> vals;
    vals.reserve(domain.vertices.size());
    for (int v : domain.vertices) {
        double w = domain.sign * u[v];
        if (w > 0) vals.push_back(w * w);
    }
    std::sort(vals.begin(), vals.end());
    const double s_max = vals.back();
    std::vector<double> levels{0.0};
    for (int i = 0; i < n_levels; ++i) {
        double q = (i + 0.5) / n_levels;
        double s = vals[static_cast<size_t>(q * (vals.size() - 1))];
        if (s > levels.back() && s < s_max * (1 - 1e-12)) levels.push_back(s);
    }

    SweepResult out;
    out.lambda = lambda;
    out.s_max = s_max;

    auto eval = [&](double s) {
        LevelGeometry geo = superlevel_geometry(grid, metric, weight, u, domain, s);
        return make_record(geo, s, lambda, mode, perimeter_override);
    };
    for (double s : levels) out.records.push_back(eval(s));

    const LevelGeometry base = superlevel_geometry(grid, metric, weight, u, domain, 0.0);
    out.norm_u2 = base.u2mass;
    out.mu_G = base.volume;

    // integrals over s: trapezoid on the records plus the (s_max, 0) endpoint;
    // note int J(G_s) mu(G_s) ds = int perimeter(s) ds
    auto integrate = [&](auto f) {
        double total = 0.0;
        for (size_t i = 0; i + 1 < out.records.size(); ++i)
            total += 0.5 * (f(out.records[i]) + f(out.records[i + 1])) *
                     (out.records[i + 1].s - out.records[i].s);
        total += 0.5 * f(out.records.back()) * (s_max - out.records.back().s);
        return total;
    };
    out.hbar = integrate([](const SweepRecord& r) { return r.perimeter; }) / out.norm_u2;
    out.inf_ratio = std::numeric_limits<double>::infinity();
    for (const auto& r : out.records) out.inf_ratio = std::min(out.inf_ratio, r.ratio);
    const double l1 = integrate([&](const SweepRecord& r) {
        return std::abs(out.hbar - r.ratio) * r.volume;
    });
    const double denom = 2.0 * (out.hbar - out.inf_ratio) * out.mu_G;
    if (denom <= 1e-14 * out.mu_G) {
        out.degenerate_bound = true;
        out.smeasure_lower_bound = 0.0;
    } else {
        out.smeasure_lower_bound = l1 / denom;
    }

    // measured Leb(S_G): refine admissibility boundaries between records
    auto refine = [&](double s_adm, double s_inadm) {
        for (int it = 0; it < 40; ++it) {
            double m = 0.5 * (s_adm + s_inadm);
            if (eval(m).admissible) s_adm = m;
            else s_inadm = m;
        }
        return 0.5 * (s_adm + s_inadm);
    };
    double measured = 0.0, run_start = -1.0, last_end = 0.0;
    for (size_t i = 0; i < out.records.size(); ++i) {
        const auto& r = out.records[i];
        if (r.admissible && run_start < 0)
            run_start = (i == 0) ? 0.0 : refine(r.s, out.records[i - 1].s);
        if (!r.admissible && run_start >= 0) {
            last_end = refine(out.records[i - 1].s, r.s);
            measured += last_end - run_start;
            run_start = -1.0;
        }
    }
    if (run_start >= 0) { // admissible through the last record
        last_end = refine(out.records.back().s, s_max);
        measured += last_end - run_start;
    }
    out.smeasure_estimate = measured;
    out.s_admissible_end = last_end;
    return out;
}

double smeasure_bound(const SweepResult& sweep) { return sweep.smeasure_lower_bound; }

double weighted_total_variation_u2(const Grid& grid, const MetricField& metric,
                                   const WeightField& weight, const Eigen::VectorXd& u,
                                   const NodalDomain& domain) {
    LevelGeometry dummy; // reuse the clip machinery triangle by triangle
    std::vector<std::uint8_t> in_dom(grid.nvert(), 0);
    for (int v : domain.vertices) in_dom[v] = 1;
    auto cells = active_cells(grid, in_dom);
    const double sign = domain.sign;
    double total = 0.0;

    if (grid.dim == 1) {
        const double h = grid.hx();
        for (auto [cx, cy] : cells) {
            auto vs = grid.cell_verts(cx, 0);
            double w0 = sign * u[vs[0]], w1 = sign * u[vs[1]];
            if (w0 <= 0 && w1 <= 0) continue;
            double lo = 0, hi = 1;
            if ((w0 > 0) != (w1 > 0)) {
                double a = w0 / (w0 - w1);
                if (w0 > 0) hi = a;
                else lo = a;
            }
            const double gc = metric.g11[grid.cid(cx, 0)];
            double f0 = weight.phi[vs[0]], f1 = weight.phi[vs[1]];
            // |d(u^2)/dx|_g = 2|w| |w'| / g, volume density sqrt(g) e^phi
            double dw = (w1 - w0) / h;
            double wm0 = w0 + lo * (w1 - w0), wm1 = w0 + hi * (w1 - w0);
            double fm = f0 + 0.5 * (lo + hi) * (f1 - f0);
            double mean_absw = 0.5 * (std::abs(wm0) + std::abs(wm1));
            total += 2.0 * mean_absw * std::abs(dw) / std::sqrt(gc) * std::exp(fm) *
                     (hi - lo) * h;
        }
        return total;
    }

    const double hx = grid.hx(), hy = grid.hy();
    for (auto [cx, cy] : cells) {
        const int c = grid.cid(cx, cy);
        auto vs = grid.cell_verts(cx, cy);
        const double g11 = metric.g11[c], g12 = metric.g12[c], g22 = metric.g22[c];
        const double det = metric.det(c, 2);
        const double sdet = std::sqrt(det);
        const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
        const double ox = grid.xcoord(cx), oy = grid.ycoord(cy);
        double wq[4], fq[4];
        for (int i = 0; i < 4; ++i) {
            wq[i] = sign * u[vs[i]];
            fq[i] = weight.phi[vs[i]];
        }
        const int tri[2][3] = {{0, 1, 3}, {0, 3, 2}};
        const double lx_[4] = {0, hx, 0, hx}, ly_[4] = {0, 0, hy, hy};
        for (const auto& T : tri) {
            double x[3], y[3], w[3], f[3];
            for (int i = 0; i < 3; ++i) {
                x[i] = ox + lx_[T[i]];
                y[i] = oy + ly_[T[i]];
                w[i] = wq[T[i]];
                f[i] = fq[T[i]];
            }
            if (w[0] <= 0 && w[1] <= 0 && w[2] <= 0) continue;
            // constant gradient of w on the triangle
            double A2 = (x[1] - x[0]) * (y[2] - y[0]) - (x[2] - x[0]) * (y[1] - y[0]);
            double gx = ((w[1] - w[0]) * (y[2] - y[0]) - (w[2] - w[0]) * (y[1] - y[0])) / A2;
            double gy = ((w[2] - w[0]) * (x[1] - x[0]) - (w[1] - w[0]) * (x[2] - x[0])) / A2;
            double gnorm = std::sqrt(gx * (i11 * gx + i12 * gy) + gy * (i12 * gx + i22 * gy));
            TriClip clip = clip_triangle(x, y, w, f, 0.0);
            PolyIntegrals pi = polygon_integrals(clip);
            total += 2.0 * gnorm * sdet * pi.int_wephi;
        }
    }
    (void)dummy;
    return total;
}

Packing build_packing(const Grid& grid, const MetricField& metric,
                      const WeightField& weight, const SpectralBasis& basis, int k,
                      BC mode, LevelSelection selection, int n_levels) {
    Packing pk;
    pk.k = k;
    pk.lambda_k = basis.eigenvalues.at(k - 1);

    if (k == 1 && mode == BC::Neumann) {
        // h_{1,N} = 0: the whole domain is a 1-packing with ratio 0
        PackedRegion reg;
        reg.domain_index = 0;
        reg.ratio = 0.0;
        reg.volume = measure_of_vertex_region(grid, metric, weight, [&] {
            std::vector<int> all(grid.nvert());
            for (int i = 0; i < grid.nvert(); ++i) all[i] = i;
            return all;
        }());
        reg.vertices.resize(grid.nvert());
        for (int i = 0; i < grid.nvert(); ++i) reg.vertices[i] = i;
        pk.sets.push_back(std::move(reg));
        pk.max_ratio = 0.0;
        pk.r_k = 1;
        pk.witness = 0;
        pk.certificate_ok = pk.lambda_k <= 1e-8;
        return pk;
    }

    RkResult rk = r_k_from_basis(grid, basis, k);
    pk.r_k = rk.r_k;
    pk.witness = rk.witness;
    const Eigen::VectorXd uw = basis.eigenvectors.col(rk.witness);
    const double lam_w = basis.eigenvalues.at(rk.witness);
    NodalDecomposition dec = nodal_domains(grid, uw);

    for (size_t d = 0; d < dec.domains.size(); ++d) {
        SweepResult sw =
            superlevel_sweep(grid, metric, weight, uw, dec.domains[d], lam_w, mode, n_levels);
        double s_pick = -1.0;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (const auto& r : sw.records) {
            if (!r.admissible) continue;
            if (selection == LevelSelection::MinRatio) {
                if (r.ratio < best_ratio) {
                    best_ratio = r.ratio;
                    s_pick = r.s;
                }
            }
        }
        if (selection == LevelSelection::Midpoint && sw.s_admissible_end > 0)
            s_pick = 0.5 * sw.s_admissible_end;
        if (s_pick < 0) {
            double minr = std::numeric_limits<double>::infinity();
            for (const auto& r : sw.records) minr = std::min(minr, r.ratio);
            throw NumericalError("S_G empty at this sweep resolution for domain " +
                                 std::to_string(d) + "; minimal observed ratio " +
                                 std::to_string(minr));
        }
        LevelGeometry geo = superlevel_geometry(grid, metric, weight, uw, dec.domains[d], s_pick);
        PackedRegion reg;
        reg.domain_index = static_cast<int>(d);
        reg.s = s_pick;
        reg.volume = geo.volume;
        reg.perimeter =
            geo.interior_perimeter + (mode == BC::Dirichlet ? geo.boundary_perimeter : 0.0);
        reg.ratio = reg.perimeter / reg.volume;
        reg.vertices = geo.vertices_inside;
        reg.boundary_segments = std::move(geo.segments);
        pk.max_ratio = std::max(pk.max_ratio, reg.ratio);
        pk.sets.push_back(std::move(reg));
    }

    pk.certificate_ok =
        pk.lambda_k <= -0.25 * pk.max_ratio * pk.max_ratio + 1e-8 * (1 + std::abs(pk.lambda_k));
    if (!pk.certificate_ok)
        throw NumericalError("packing certificate violated: lambda_k > -J^2/4");
    return pk;
}

} // namespace ctk
