#pragma once

#include <Eigen/Core>

namespace stackcast::ensemble {

// min ||y - P w||^2 subject to w >= 0, no intercept. Lawson-Hanson active
// set; the passive-set solve at the end is a plain least-squares solve so an
// exact fit is reproduced to rounding. Throws on non-finite input.
Eigen::VectorXd fit_nnls(const Eigen::MatrixXd& P, const Eigen::VectorXd& y);

struct KktResidual {
    double negativity = 0.0;      // max(0, -min w)
    double dual_violation = 0.0;  // max(0, -min P'(Pw - y))
    double slackness = 0.0;       // max |w_i * grad_i|
};
KktResidual kkt_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, const Eigen::VectorXd& w);

}  // namespace stackcast::ensemble
