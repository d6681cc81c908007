#include "ctk/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <random>
#include <sstream>

namespace ctk {

namespace {

// B-orthonormalize the columns of X in place (Cholesky of the small Gram matrix).
void b_orthonormalize(Eigen::MatrixXd& X, const Eigen::SparseMatrix<double>& B) {
    Eigen::MatrixXd G = X.transpose() * (B * X);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        // Rank-deficient block (can happen on the first iterations): fall back
        // to an eigenvalue-filtered orthonormalization.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        Eigen::VectorXd d = es.eigenvalues().cwiseMax(1e-14 * es.eigenvalues().maxCoeff());
        Eigen::MatrixXd T = es.eigenvectors() * d.cwiseSqrt().cwiseInverse().asDiagonal();
        X = X * T;
        return;
    }
    X = llt.matrixU().solve<Eigen::OnTheRight>(X);
}

} // namespace

SpectralBasis smallest_eigenpairs(const DiscreteOperator& op, int count,
                                  const EigOptions& opts) {
    const int n = static_cast<int>(op.free_vertices.size());
    if (count < 1 || count > n)
        throw ConfigError("eigenpair count out of range (1.." + std::to_string(n) + ")");
    if (!(opts.tol > 0)) throw ConfigError("tolerance must be > 0");

    const int block = std::min(n, count + std::max(5, count));

    Eigen::SparseMatrix<double> A = op.stiffness + opts.shift * op.mass;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw NumericalError("factorization of shifted operator failed");

    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd X(n, block);
    for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = dist(rng);

    Eigen::VectorXd ritz(block);
    std::vector<double> res(count, 1.0);
    bool converged = false;
    for (int it = 0; it < opts.max_iter && !converged; ++it) {
        X = solver.solve(op.mass * X);
        b_orthonormalize(X, op.mass);
        Eigen::MatrixXd Kp = X.transpose() * (op.stiffness * X);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kp);
        ritz = es.eigenvalues(); // ascending nu = -lambda
        X = X * es.eigenvectors();

        converged = true;
        for (int j = 0; j < count; ++j) {
            Eigen::VectorXd bx = op.mass * X.col(j);
            Eigen::VectorXd r = op.stiffness * X.col(j) - ritz[j] * bx;
            res[j] = r.norm() / bx.norm();
            if (res[j] > opts.tol) converged = false;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "eigensolver did not converge within " << opts.max_iter
            << " iterations; residuals:";
        for (int j = 0; j < count; ++j) msg << ' ' << res[j];
        throw NumericalError(msg.str());
    }

    SpectralBasis basis;
    basis.bc = op.bc;
    basis.eigenvalues.resize(count);
    basis.residuals = res;
    basis.eigenvectors.resize(op.nvert, count);
    for (int j = 0; j < count; ++j) {
        basis.eigenvalues[j] = -ritz[j]; // paper sign: lambda <= 0, decreasing
        basis.eigenvectors.col(j) = op.prolong(X.col(j));
    }
    return basis;
}

} // namespace ctk
