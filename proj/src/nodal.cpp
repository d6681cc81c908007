#include "ctk/nodal.hpp"

#include <cmath>

namespace ctk {

NodalDecomposition nodal_domains(const Grid& grid, const Eigen::VectorXd& u,
                                 double zero_tol) {
    if (u.size() != grid.nvert()) throw ConfigError("eigenvector size mismatch");
    const double umax = u.cwiseAbs().maxCoeff();
    if (zero_tol < 0) zero_tol = 1e-8 * umax;
    if (umax <= zero_tol)
        throw NumericalError("function is identically zero within tolerance; no nodal domains");

    NodalDecomposition dec;
    dec.zero_tol = zero_tol;
    const int n = grid.nvert();
    std::vector<int> label(n, -1);
    std::vector<int> stack;
    int nbr[4];

    for (int v0 = 0; v0 < n; ++v0) {
        if (label[v0] >= 0) continue;
        if (std::abs(u[v0]) <= zero_tol) {
            label[v0] = -2;
            dec.zero_set.push_back(v0);
            continue;
        }
        const int sign = u[v0] > 0 ? 1 : -1;
        const int id = static_cast<int>(dec.domains.size());
        dec.domains.push_back({sign, {}});
        stack.assign(1, v0);
        label[v0] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            dec.domains[id].vertices.push_back(v);
            int cnt = grid.neighbors(v, nbr);
            for (int i = 0; i < cnt; ++i) {
                int w = nbr[i];
                if (label[w] >= 0 || label[w] == -2) continue;
                if (std::abs(u[w]) <= zero_tol) continue; // classify when reached in scan
                if ((u[w] > 0 ? 1 : -1) != sign) continue;
                label[w] = id;
                stack.push_back(w);
            }
        }
    }
    return dec;
}

RkResult r_k_from_basis(const Grid& grid, const SpectralBasis& basis, int k,
                        const std::vector<std::pair<double, Eigen::VectorXd>>& extras) {
    const int count = static_cast<int>(basis.eigenvalues.size());
    if (k < 1 || k > count) throw ConfigError("k out of range for the computed basis");
    const double lambda_k = basis.eigenvalues[k - 1];
    // Small slack so degenerate eigenvalues straddling lambda_k are included.
    const double slack = 1e-8 * (1.0 + std::abs(lambda_k));

    RkResult best;
    auto consider = [&](double lambda, const Eigen::VectorXd& u, int idx) {
        if (lambda < lambda_k - slack) return;
        int cnt = static_cast<int>(nodal_domains(grid, u).domains.size());
        if (cnt > best.r_k) {
            best.r_k = cnt;
            best.witness = idx;
        }
    };
    for (int j = 0; j < count; ++j) consider(basis.eigenvalues[j], basis.eigenvectors.col(j), j);
    for (size_t j = 0; j < extras.size(); ++j)
        consider(extras[j].first, extras[j].second, count + static_cast<int>(j));
    return best;
}

} // namespace ctk
