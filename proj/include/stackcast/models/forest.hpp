#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace stackcast::models {

struct TreeNode {
    std::int32_t feature = -1;  // -1: leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(const double* x, std::size_t stride) const;
    std::size_t depth() const;
};

struct ForestParams {
    std::size_t n_trees = 400;
    std::size_t max_depth = 8;
};

struct Forest {
    std::vector<RegressionTree> trees;
    std::size_t n_features = 0;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    std::size_t max_depth() const;
};

// Bagged CART regression: bootstrap rows per tree, every feature considered at
// every split, variance-reduction criterion, bootstrap-weighted leaf means.
Forest fit_random_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                         std::uint64_t seed);

}  // namespace stackcast::models
