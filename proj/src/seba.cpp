#include "ctk/seba.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctk {

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& f, double a) {
    if (a < 0) throw ConfigError("threshold must be >= 0");
    Eigen::VectorXd out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        double m = std::abs(f[i]) - a;
        out[i] = m > 0 ? (f[i] > 0 ? m : -m) : 0.0;
    }
    return out;
}

Eigen::MatrixXd sup_normalized(const Eigen::MatrixXd& vectors) {
    Eigen::MatrixXd out = vectors;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        // unit sup norm with a deterministic sign (eigenvector signs are
        // otherwise arbitrary): the first entry reaching half the sup norm is
        // made positive, i.e. the first lobe of the function points up
        double m = out.col(j).cwiseAbs().maxCoeff();
        if (m == 0) continue;
        double sgn = 1.0;
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            if (std::abs(out(i, j)) >= 0.5 * m) {
                sgn = out(i, j) > 0 ? 1.0 : -1.0;
                break;
            }
        out.col(j) /= sgn * m;
    }
    return out;
}

namespace {

Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().transpose();
}

} // namespace

SebaRotation seba_rotate(const Grid& grid, const Eigen::MatrixXd& eigenvectors, int l,
                         int max_iter, double conv_tol) {
    const int k = static_cast<int>(eigenvectors.cols());
    if (l < 1 || l > k) throw ConfigError("l must satisfy 1 <= l <= k");
    const Eigen::Index p = eigenvectors.rows();

    // fix the arbitrary eigenvector signs/scales first so alpha applies to the
    // same sup-normalized functions the rest of the pipeline uses
    const Eigen::MatrixXd W = sup_normalized(eigenvectors);

    // the sparsifying iteration requires Euclidean-orthonormal columns
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    Eigen::MatrixXd V =
        qr.householderQ() * Eigen::MatrixXd::Identity(p, k);
    // fix QR sign ambiguity deterministically (positive diagonal of R)
    Eigen::MatrixXd R_qr = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
        if (R_qr(j, j) < 0) V.col(j) = -V.col(j);

    const double mu = 0.99 / std::sqrt(static_cast<double>(p));
    Eigen::MatrixXd R = Eigen::MatrixXd::Identity(k, k);
    SebaRotation out;
    out.converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd S = V * R.transpose();
        for (int j = 0; j < k; ++j) {
            S.col(j) = soft_threshold(S.col(j), mu);
            double n = S.col(j).norm();
            if (n > 0) S.col(j) /= n;
        }
        Eigen::MatrixXd R2 = polar_factor(S.transpose() * V);
        double delta = (R2 - R).norm();
        R = R2;
        out.iterations = it + 1;
        if (delta < conv_tol) {
            out.converged = true;
            break;
        }
    }

    // canonicalize the leading l rows: sign so each combination's max-magnitude
    // entry is positive, order by support centroid
    Eigen::MatrixXd F = W * R.transpose(); // combinations, columns
    struct RowKey {
        double cy, cx;
        int idx;
    };
    std::vector<RowKey> keys;
    for (int i = 0; i < k; ++i) {
        Eigen::Index jmax;
        F.col(i).cwiseAbs().maxCoeff(&jmax);
        if (F(jmax, i) < 0) {
            F.col(i) = -F.col(i);
            R.row(i) = -R.row(i);
        }
        double wsum = 0, cx = 0, cy = 0;
        for (int v = 0; v < grid.nvert(); ++v) {
            double w = std::abs(F(v, i));
            wsum += w;
            cx += w * grid.xcoord(v % grid.nx);
            cy += w * grid.ycoord(v / grid.nx);
        }
        keys.push_back({cy / wsum, cx / wsum, i});
    }
    std::stable_sort(keys.begin(), keys.end(), [](const RowKey& a, const RowKey& b) {
        if (a.cy != b.cy) return a.cy < b.cy;
        return a.cx < b.cx;
    });
    out.alpha.resize(l, k);
    for (int i = 0; i < l; ++i) out.alpha.row(i) = R.row(keys[i].idx);
    return out;
}

double min_disjoint_threshold(const Eigen::MatrixXd& combinations) {
    const int l = static_cast<int>(combinations.cols());
    if (l < 2) throw ConfigError("need at least 2 combinations");
    // thresholds above the weakest column's sup norm empty that column, so the
    // search space is [0, min_j sup |f_j|)
    double amax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < l; ++i)
        amax = std::min(amax, combinations.col(i).cwiseAbs().maxCoeff());

    auto disjoint = [&](double a) {
        for (int i = 0; i < l; ++i) {
            bool nonzero = false;
            for (Eigen::Index v = 0; v < combinations.rows(); ++v)
                if (std::abs(combinations(v, i)) > a) {
                    nonzero = true;
                    break;
                }
            if (!nonzero) return false;
        }
        for (Eigen::Index v = 0; v < combinations.rows(); ++v) {
            int cnt = 0;
            for (int i = 0; i < l; ++i)
                if (std::abs(combinations(v, i)) > a) ++cnt;
            if (cnt > 1) return false;
        }
        return true;
    };

    if (!disjoint(amax * (1 - 1e-9)))
        throw NumericalError("no disjoint threshold exists (a combination is dominated)");
    double lo = 0.0, hi = amax;
    if (disjoint(0.0)) return 0.0;
    while (hi - lo > 1e-4 * amax) {
        double m = 0.5 * (lo + hi);
        if (disjoint(m)) hi = m;
        else lo = m;
    }
    return hi;
}

SebaCertificate seba_certify(const Grid& grid, const MetricField& metric,
                             const WeightField& weight, const SpectralBasis& basis,
                             const Eigen::MatrixXd& alpha, double a, BC mode,
                             int n_levels, LevelSelection selection) {
    const int l = static_cast<int>(alpha.rows());
    const int k = static_cast<int>(alpha.cols());
    if (k > static_cast<int>(basis.eigenvalues.size()))
        throw ConfigError("alpha references more eigenvectors than computed");
    const double lambda_k = basis.eigenvalues[k - 1];

    SebaCertificate cert;
    cert.alpha = alpha;
    cert.a = a;

    const Eigen::MatrixXd U = sup_normalized(basis.eigenvectors.leftCols(k));
    cert.combinations = U * alpha.transpose();
    cert.sparse_functions.resize(U.rows(), l);
    for (int i = 0; i < l; ++i)
        cert.sparse_functions.col(i) = soft_threshold(cert.combinations.col(i), a);

    // disjoint supports and nonzero (preconditions of the proposition)
    for (int i = 0; i < l; ++i)
        if (cert.sparse_functions.col(i).cwiseAbs().maxCoeff() <= 0)
            throw NumericalError("thresholded combination " + std::to_string(i) + " is zero");
    for (Eigen::Index v = 0; v < U.rows(); ++v) {
        int cnt = 0;
        for (int i = 0; i < l; ++i)
            if (cert.sparse_functions(v, i) != 0) ++cnt;
        if (cnt > 1) throw NumericalError("thresholded supports are not pairwise disjoint");
    }

    // L2(M;mu) quantities via the Neumann mass/stiffness matrices
    DiscreteOperator full = assemble(grid, metric, weight, BC::Neumann);
    auto l2sq = [&](const Eigen::VectorXd& f) { return f.dot(full.mass * f); };

    cert.packing.k = k;
    cert.packing.lambda_k = lambda_k;
    double max_ret = 0.0, min_ret = 1.0;
    for (int i = 0; i < l; ++i) {
        const Eigen::VectorXd f = cert.combinations.col(i);
        const Eigen::VectorXd tau = cert.sparse_functions.col(i);
        double ret = l2sq(tau) / l2sq(f);
        cert.retention.push_back(ret);
        max_ret = std::max(max_ret, ret);
        min_ret = std::min(min_ret, ret);

        // nodal domain of tau minimizing the Rayleigh quotient
        NodalDecomposition dec = nodal_domains(grid, tau);
        double best_q = std::numeric_limits<double>::infinity();
        int best_d = -1;
        for (size_t d = 0; d < dec.domains.size(); ++d) {
            Eigen::VectorXd masked = Eigen::VectorXd::Zero(tau.size());
            for (int v : dec.domains[d].vertices) masked[v] = tau[v];
            double q = masked.dot(full.stiffness * masked) / masked.dot(full.mass * masked);
            if (q < best_q) {
                best_q = q;
                best_d = static_cast<int>(d);
            }
        }
        cert.rayleigh.push_back(best_q);

        SweepResult sw = superlevel_sweep(grid, metric, weight, tau, dec.domains[best_d],
                                          -best_q, mode, n_levels);
        cert.level_end.push_back(std::sqrt(sw.s_admissible_end));

        double s_pick = -1.0, best_ratio = std::numeric_limits<double>::infinity();
        for (const auto& r : sw.records)
            if (r.admissible && selection == LevelSelection::MinRatio && r.ratio < best_ratio) {
                best_ratio = r.ratio;
                s_pick = r.s;
            }
        if (selection == LevelSelection::Midpoint && sw.s_admissible_end > 0)
            s_pick = 0.5 * sw.s_admissible_end;
        if (s_pick < 0)
            throw NumericalError("S~ empty at this resolution for combination " +
                                 std::to_string(i));
        LevelGeometry geo =
            superlevel_geometry(grid, metric, weight, tau, dec.domains[best_d], s_pick);
        PackedRegion reg;
        reg.domain_index = best_d;
        reg.s = s_pick;
        reg.volume = geo.volume;
        reg.perimeter =
            geo.interior_perimeter + (mode == BC::Dirichlet ? geo.boundary_perimeter : 0.0);
        reg.ratio = reg.perimeter / reg.volume;
        reg.vertices = geo.vertices_inside;
        reg.boundary_segments = std::move(geo.segments);
        cert.packing.max_ratio = std::max(cert.packing.max_ratio, reg.ratio);
        cert.packing.sets.push_back(std::move(reg));
        cert.sweeps.push_back(std::move(sw));
    }

    cert.ratio_bound = 0.0;
    for (double q : cert.rayleigh) cert.ratio_bound = std::max(cert.ratio_bound, 2 * std::sqrt(q));
    cert.norm_ratio_bound = 2 * std::sqrt(-lambda_k) / std::sqrt(min_ret);

    const double rhs = -0.25 * cert.packing.max_ratio * cert.packing.max_ratio * max_ret;
    cert.bound_ok = lambda_k <= rhs + 1e-8 * (1 + std::abs(lambda_k));
    cert.packing.certificate_ok = cert.bound_ok;
    if (!cert.bound_ok)
        throw NumericalError("SEBA certificate violated: lambda_k > -J^2/4 * retention");
    return cert;
}

} // namespace ctk
