#include "stackcast/models/linear.hpp"

#include <Eigen/QR>
#include <stdexcept>
#include <string>

#include "stackcast/common/log.hpp"

namespace stackcast::models {

Eigen::VectorXd LinearModel::predict(const Eigen::MatrixXd& X) const {
    return (X * coef).array() + intercept;
}

LinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw std::invalid_argument("fit_linear: X and y row counts differ");
    if (X.rows() < X.cols() + 1) {
        throw std::invalid_argument("fit_linear: " + std::to_string(X.rows()) + " rows for " +
                                    std::to_string(X.cols()) + " columns plus intercept");
    }
    Eigen::MatrixXd A(X.rows(), X.cols() + 1);
    A.col(0).setOnes();
    A.rightCols(X.cols()) = X;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd beta = cod.solve(y);

    LinearModel m;
    m.intercept = beta(0);
    m.coef = beta.tail(X.cols());
    m.rank = std::size_t(cod.rank());
    m.rank_deficient = cod.rank() < A.cols();
    if (m.rank_deficient) {
        log::warn("fit_linear: design has rank " + std::to_string(m.rank) + " of " + std::to_string(A.cols()) +
                  ", using the minimum-norm solution");
    }
    return m;
}

}  // namespace stackcast::models
