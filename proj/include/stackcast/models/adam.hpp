#pragma once

#include <vector>

#include <Eigen/Core>

namespace stackcast::models {

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam over a fixed list of parameter blocks, addressed by index.
class Adam {
public:
    Adam(const std::vector<Eigen::Index>& block_sizes, AdamParams params);
    // Call once per optimizer step, before the block updates.
    void begin_step() { ++t_; }
    void update(std::size_t block, double* param, const double* grad);

private:
    AdamParams p_;
    std::vector<Eigen::VectorXd> m_, v_;
    long t_ = 0;
};

}  // namespace stackcast::models
