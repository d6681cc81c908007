#include "ctk/assembly.hpp"

#include <cmath>
#include <fstream>

namespace ctk {

BC bc_from_string(const std::string& s) {
    if (s == "neumann") return BC::Neumann;
    if (s == "dirichlet") return BC::Dirichlet;
    throw ConfigError("unknown boundary condition '" + s + "'");
}

std::string to_string(BC bc) { return bc == BC::Neumann ? "neumann" : "dirichlet"; }

Eigen::VectorXd DiscreteOperator::prolong(const Eigen::VectorXd& u_free) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(nvert);
    for (size_t i = 0; i < free_vertices.size(); ++i) full[free_vertices[i]] = u_free[i];
    return full;
}

Eigen::VectorXd DiscreteOperator::restrict_to_free(const Eigen::VectorXd& u_full) const {
    Eigen::VectorXd r(free_vertices.size());
    for (size_t i = 0; i < free_vertices.size(); ++i) r[i] = u_full[free_vertices[i]];
    return r;
}

namespace {

using Trip = Eigen::Triplet<double>;

void add_triangle(std::vector<Trip>& kt, std::vector<Trip>& mt, const int v[3],
                  const double px[3], const double py[3], double g11, double g12,
                  double g22, double wfac) {
    const double area =
        0.5 * ((px[1] - px[0]) * (py[2] - py[0]) - (px[2] - px[0]) * (py[1] - py[0]));
    const double det = g11 * g22 - g12 * g12;
    const double sdet = std::sqrt(det);
    // inverse metric
    const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;

    double bx[3], by[3];
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        bx[i] = (py[j] - py[k]) / (2 * area);
        by[i] = (px[k] - px[j]) / (2 * area);
    }
    const double kc = wfac * sdet * area;
    const double mc = wfac * sdet * area / 12.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double kij = kc * (bx[i] * (i11 * bx[j] + i12 * by[j]) +
                               by[i] * (i12 * bx[j] + i22 * by[j]));
            kt.emplace_back(v[i], v[j], kij);
            mt.emplace_back(v[i], v[j], mc * (i == j ? 2.0 : 1.0));
        }
}

} // namespace

DiscreteOperator assemble(const Grid& grid, const MetricField& metric,
                          const WeightField& weight, BC bc,
                          const std::vector<double>* cell_density_scale) {
    if (bc == BC::Dirichlet) {
        bool has_boundary = false;
        for (auto b : grid.is_boundary) has_boundary |= (b != 0);
        if (!has_boundary)
            throw ConfigError("dirichlet boundary condition on a boundaryless domain");
    }
    if (static_cast<int>(weight.phi.size()) != grid.nvert())
        throw ConfigError("weight field size mismatch");
    if (static_cast<int>(metric.g11.size()) != grid.ncell())
        throw ConfigError("metric field size mismatch");
    for (int c = 0; c < grid.ncell(); ++c)
        if (!(metric.g11[c] > 0) || !(metric.det(c, grid.dim) > 0))
            throw NumericalError("metric not positive definite in cell " + std::to_string(c));

    const int n = grid.nvert();
    std::vector<Trip> kt, mt;
    kt.reserve(grid.ncell() * 18);
    mt.reserve(grid.ncell() * 18);

    if (grid.dim == 1) {
        const double h = grid.hx();
        for (int c = 0; c < grid.ncx(); ++c) {
            auto vs = grid.cell_verts(c, 0);
            const double w =
                0.5 * (std::exp(weight.phi[vs[0]]) + std::exp(weight.phi[vs[1]])) *
                (cell_density_scale ? (*cell_density_scale)[c] : 1.0);
            const double g = metric.g11[c];
            const double kc = w / std::sqrt(g) / h;       // e^phi g^{-1} sqrt(g) / h
            const double m0 = w * std::sqrt(g) * h / 6.0; // consistent segment mass
            int a = vs[0], b = vs[1];
            kt.emplace_back(a, a, kc);
            kt.emplace_back(b, b, kc);
            kt.emplace_back(a, b, -kc);
            kt.emplace_back(b, a, -kc);
            mt.emplace_back(a, a, 2 * m0);
            mt.emplace_back(b, b, 2 * m0);
            mt.emplace_back(a, b, m0);
            mt.emplace_back(b, a, m0);
        }
    } else {
        const double hx = grid.hx(), hy = grid.hy();
        for (int cy = 0; cy < grid.ncy(); ++cy)
            for (int cx = 0; cx < grid.ncx(); ++cx) {
                const int c = grid.cid(cx, cy);
                auto vs = grid.cell_verts(cx, cy);
                double w = 0.0;
                for (int i = 0; i < 4; ++i) w += std::exp(weight.phi[vs[i]]);
                w *= 0.25 * (cell_density_scale ? (*cell_density_scale)[c] : 1.0);
                const double g11 = metric.g11[c], g12 = metric.g12[c], g22 = metric.g22[c];
                // fixed diagonal v00-v11
                {
                    int v[3] = {vs[0], vs[1], vs[3]};
                    double px[3] = {0, hx, hx}, py[3] = {0, 0, hy};
                    add_triangle(kt, mt, v, px, py, g11, g12, g22, w);
                }
                {
                    int v[3] = {vs[0], vs[3], vs[2]};
                    double px[3] = {0, hx, 0}, py[3] = {0, hy, hy};
                    add_triangle(kt, mt, v, px, py, g11, g12, g22, w);
                }
            }
    }

    Eigen::SparseMatrix<double> K(n, n), M(n, n);
    K.setFromTriplets(kt.begin(), kt.end());
    M.setFromTriplets(mt.begin(), mt.end());

    DiscreteOperator op;
    op.bc = bc;
    op.nvert = n;
    op.vertex_to_free.assign(n, -1);
    for (int v = 0; v < n; ++v) {
        if (bc == BC::Dirichlet && grid.is_boundary[v]) continue;
        op.vertex_to_free[v] = static_cast<int>(op.free_vertices.size());
        op.free_vertices.push_back(v);
    }

    if (static_cast<int>(op.free_vertices.size()) == n) {
        op.stiffness = std::move(K);
        op.mass = std::move(M);
    } else {
        const int m = static_cast<int>(op.free_vertices.size());
        std::vector<Trip> ks, ms;
        auto restrict_mat = [&](const Eigen::SparseMatrix<double>& A, std::vector<Trip>& out) {
            for (int col = 0; col < A.outerSize(); ++col) {
                int fc = op.vertex_to_free[col];
                if (fc < 0) continue;
                for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
                    int fr = op.vertex_to_free[it.row()];
                    if (fr >= 0) out.emplace_back(fr, fc, it.value());
                }
            }
        };
        restrict_mat(K, ks);
        restrict_mat(M, ms);
        op.stiffness.resize(m, m);
        op.mass.resize(m, m);
        op.stiffness.setFromTriplets(ks.begin(), ks.end());
        op.mass.setFromTriplets(ms.begin(), ms.end());
    }
    return op;
}

void export_coo(const Eigen::SparseMatrix<double>& m, const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    for (int col = 0; col < m.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace ctk
