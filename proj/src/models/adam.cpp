#include "stackcast/models/adam.hpp"

#include <cmath>

namespace stackcast::models {

Adam::Adam(const std::vector<Eigen::Index>& block_sizes, AdamParams params) : p_(params) {
    for (auto n : block_sizes) {
        m_.push_back(Eigen::VectorXd::Zero(n));
        v_.push_back(Eigen::VectorXd::Zero(n));
    }
}

void Adam::update(std::size_t block, double* param, const double* grad) {
    auto& m = m_[block];
    auto& v = v_[block];
    const double c1 = 1.0 - std::pow(p_.beta1, double(t_));
    const double c2 = 1.0 - std::pow(p_.beta2, double(t_));
    const double step = p_.lr * std::sqrt(c2) / c1;
    const double eps_hat = p_.eps * std::sqrt(c2);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double g = grad[i];
        m(i) = p_.beta1 * m(i) + (1.0 - p_.beta1) * g;
        v(i) = p_.beta2 * v(i) + (1.0 - p_.beta2) * g * g;
        param[i] -= step * m(i) / (std::sqrt(v(i)) + eps_hat);
    }
}

}  // namespace stackcast::models
