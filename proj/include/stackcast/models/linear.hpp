#pragma once

#include <Eigen/Core>

namespace stackcast::models {

struct LinearModel {
    double intercept = 0.0;
    Eigen::VectorXd coef;
    std::size_t rank = 0;  // of [1 X]
    bool rank_deficient = false;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return intercept + x.dot(coef.transpose()); }
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Least squares with an intercept through a complete orthogonal decomposition;
// a rank-deficient design gets the minimum-norm solution and a logged warning.
LinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

}  // namespace stackcast::models
