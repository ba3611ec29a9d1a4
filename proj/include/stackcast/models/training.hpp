#pragma once

// Small helpers shared by the neural trainers.

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace stackcast::models {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Random hold-out of round(fraction * n) rows, at least one row left for training.
inline Split validation_split(std::size_t n, double fraction, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::size_t nv = std::size_t(std::llround(fraction * double(n)));
    nv = std::min(nv, n - 1);
    Split s;
    s.validation.assign(idx.begin(), idx.begin() + std::ptrdiff_t(nv));
    s.train.assign(idx.begin() + std::ptrdiff_t(nv), idx.end());
    std::sort(s.validation.begin(), s.validation.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

inline Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& M, const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(M.rows(), Eigen::Index(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(Eigen::Index(j)) = M.col(Eigen::Index(idx[j]));
    return out;
}

inline Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
    Eigen::VectorXd out(Eigen::Index(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out(Eigen::Index(j)) = v(Eigen::Index(idx[j]));
    return out;
}

// Keeps a copy of the best model seen; signals a stop after `patience`
// epochs without improvement.
template <typename Model>
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    bool observe(double loss, const Model& m, std::size_t epoch) {
        if (loss < best_loss_) {
            best_loss_ = loss;
            best_ = m;
            best_epoch_ = epoch;
            since_ = 0;
            return false;
        }
        return ++since_ >= patience_;
    }

    const Model& best() const { return best_; }
    double best_loss() const { return best_loss_; }
    std::size_t best_epoch() const { return best_epoch_; }

private:
    std::size_t patience_;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::size_t best_epoch_ = 0;
    std::size_t since_ = 0;
    Model best_{};
};

}  // namespace stackcast::models
