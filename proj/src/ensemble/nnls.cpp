#include "stackcast/ensemble/nnls.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stackcast::ensemble {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, const std::vector<bool>& passive) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
        if (passive[std::size_t(j)]) cols.push_back(j);
    }
    Eigen::VectorXd z = Eigen::VectorXd::Zero(P.cols());
    if (cols.empty()) return z;
    Eigen::MatrixXd A(P.rows(), Eigen::Index(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) A.col(Eigen::Index(k)) = P.col(cols[k]);
    const Eigen::VectorXd s = A.completeOrthogonalDecomposition().solve(y);
    for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = s(Eigen::Index(k));
    return z;
}

}  // namespace

Eigen::VectorXd fit_nnls(const Eigen::MatrixXd& P, const Eigen::VectorXd& y) {
    if (P.rows() != y.size()) throw std::invalid_argument("nnls: row count mismatch");
    if (P.rows() == 0 || P.cols() == 0) throw std::invalid_argument("nnls: empty problem");
    if (!P.allFinite() || !y.allFinite()) throw std::invalid_argument("nnls: non-finite input");

    const Eigen::Index n = P.cols();
    // tolerance on the gradient, relative to the data scale
    const double scale = std::max((P.transpose() * y).cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double tol = 1e-13 * double(std::max(P.rows(), n)) * scale;

    std::vector<bool> passive(std::size_t(n), false);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = P.transpose() * (y - P * w);
    for (int outer = 0; outer < 3 * int(n) + 10; ++outer) {
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[std::size_t(j)] && grad(j) > tol && (best < 0 || grad(j) > grad(best))) best = j;
        }
        if (best < 0) break;
        passive[std::size_t(best)] = true;

        for (int inner = 0; inner < 3 * int(n) + 10; ++inner) {
            const Eigen::VectorXd z = solve_passive(P, y, passive);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[std::size_t(j)] && z(j) <= 0.0) feasible = false;
            }
            if (feasible) {
                w = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[std::size_t(j)] && z(j) <= 0.0) alpha = std::min(alpha, w(j) / (w(j) - z(j)));
            }
            w += alpha * (z - w);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[std::size_t(j)] && w(j) <= 1e-15 * std::max(1.0, w.cwiseAbs().maxCoeff())) {
                    passive[std::size_t(j)] = false;
                    w(j) = 0.0;
                }
            }
        }
        grad = P.transpose() * (y - P * w);
    }
    return w;
}

KktResidual kkt_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    const Eigen::VectorXd g = P.transpose() * (P * w - y);
    KktResidual r;
    r.negativity = std::max(0.0, -w.minCoeff());
    r.dual_violation = std::max(0.0, -g.minCoeff());
    r.slackness = (w.array() * g.array()).abs().maxCoeff();
    return r;
}

}  // namespace stackcast::ensemble
