#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>

namespace stackcast::models {

struct NetTrainParams {
    double lr = 1e-3;
    std::size_t batch = 256;
    double validation_fraction = 0.1;
    std::size_t patience = 10;
    std::size_t max_epochs = 200;
    double dropout = 0.6;
    // Validation rows are out-of-sample for the transform and get clamped.
    double validation_cap = std::numeric_limits<double>::infinity();
};

struct TrainReport {
    std::size_t epochs = 0;
    std::size_t best_epoch = 0;
    double best_validation_mae = 0.0;
};

struct Ffnn {
    Eigen::MatrixXd W1;  // hidden x inputs
    Eigen::VectorXd b1;
    Eigen::VectorXd w2;  // hidden
    double b2 = 0.0;

    static Ffnn init(std::size_t inputs, std::size_t hidden, std::uint64_t seed);
    std::size_t inputs() const { return std::size_t(W1.cols()); }
    std::size_t parameter_count() const { return std::size_t(W1.size() + b1.size() + w2.size() + 1); }

    // Rows of X are samples; dropout off.
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& p);
};

// Mean absolute error over rows and its gradient (same layout as flatten()).
// `mask`, when given, is hidden x rows and already holds the inverted-dropout
// scale (0 or 1/keep).
double ffnn_loss_and_gradient(const Ffnn& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              Eigen::VectorXd* gradient, const Eigen::MatrixXd* mask = nullptr);

// 48 ReLU units by default. Throws std::runtime_error on a non-finite loss.
Ffnn fit_ffnn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const NetTrainParams& params, std::uint64_t seed,
              std::size_t hidden = 48, TrainReport* report = nullptr);

}  // namespace stackcast::models
