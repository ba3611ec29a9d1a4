#include "stackcast/models/ffnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "stackcast/common/stats.hpp"
#include "stackcast/models/adam.hpp"
#include "stackcast/models/training.hpp"

namespace stackcast::models {

Ffnn Ffnn::init(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Ffnn n;
    n.W1.resize(Eigen::Index(hidden), Eigen::Index(inputs));
    n.b1 = Eigen::VectorXd::Zero(Eigen::Index(hidden));
    n.w2.resize(Eigen::Index(hidden));
    std::uniform_real_distribution<double> u1(-1.0 / std::sqrt(double(inputs)), 1.0 / std::sqrt(double(inputs)));
    for (Eigen::Index i = 0; i < n.W1.size(); ++i) n.W1.data()[i] = u1(rng);
    std::uniform_real_distribution<double> u2(-1.0 / std::sqrt(double(hidden)), 1.0 / std::sqrt(double(hidden)));
    for (Eigen::Index i = 0; i < n.w2.size(); ++i) n.w2(i) = u2(rng);
    return n;
}

Eigen::VectorXd Ffnn::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != W1.cols()) throw std::invalid_argument("ffnn: wrong feature count");
    const Eigen::MatrixXd A = ((W1 * X.transpose()).colwise() + b1).cwiseMax(0.0);
    return (A.transpose() * w2).array() + b2;
}

Eigen::VectorXd Ffnn::flatten() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    p.segment(k, W1.size()) = Eigen::Map<const Eigen::VectorXd>(W1.data(), W1.size());
    k += W1.size();
    p.segment(k, b1.size()) = b1;
    k += b1.size();
    p.segment(k, w2.size()) = w2;
    k += w2.size();
    p(k) = b2;
    return p;
}

void Ffnn::unflatten(const Eigen::VectorXd& p) {
    if (p.size() != Eigen::Index(parameter_count())) throw std::invalid_argument("ffnn: parameter size mismatch");
    Eigen::Index k = 0;
    Eigen::Map<Eigen::VectorXd>(W1.data(), W1.size()) = p.segment(k, W1.size());
    k += W1.size();
    b1 = p.segment(k, b1.size());
    k += b1.size();
    w2 = p.segment(k, w2.size());
    k += w2.size();
    b2 = p(k);
}

namespace {

// Xt: inputs x batch. Writes block gradients, returns mean |err|.
double batch_step(const Ffnn& net, const Eigen::MatrixXd& Xt, const Eigen::VectorXd& y, const Eigen::MatrixXd* mask,
                  Eigen::MatrixXd& gW1, Eigen::VectorXd& gb1, Eigen::VectorXd& gw2, double& gb2) {
    const double B = double(Xt.cols());
    const Eigen::MatrixXd Z = (net.W1 * Xt).colwise() + net.b1;
    Eigen::MatrixXd A = Z.cwiseMax(0.0);
    if (mask) A = A.cwiseProduct(*mask);
    const Eigen::VectorXd out = (A.transpose() * net.w2).array() + net.b2;
    const Eigen::VectorXd err = out - y;
    const Eigen::VectorXd g = err.unaryExpr([B](double e) { return (e > 0.0 ? 1.0 : e < 0.0 ? -1.0 : 0.0) / B; });
    gw2 = A * g;
    gb2 = g.sum();
    Eigen::MatrixXd dZ = net.w2 * g.transpose();
    if (mask) dZ = dZ.cwiseProduct(*mask);
    dZ = dZ.cwiseProduct((Z.array() > 0.0).cast<double>().matrix());
    gW1 = dZ * Xt.transpose();
    gb1 = dZ.rowwise().sum();
    return err.cwiseAbs().sum() / B;
}

}  // namespace

double ffnn_loss_and_gradient(const Ffnn& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              Eigen::VectorXd* gradient, const Eigen::MatrixXd* mask) {
    Eigen::MatrixXd gW1;
    Eigen::VectorXd gb1, gw2;
    double gb2 = 0.0;
    const double loss = batch_step(net, X.transpose(), y, mask, gW1, gb1, gw2, gb2);
    if (gradient) {
        Ffnn g = net;
        g.W1 = gW1;
        g.b1 = gb1;
        g.w2 = gw2;
        g.b2 = gb2;
        *gradient = g.flatten();
    }
    return loss;
}

Ffnn fit_ffnn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const NetTrainParams& params, std::uint64_t seed,
              std::size_t hidden, TrainReport* report) {
    const std::size_t n = std::size_t(X.rows()), d = std::size_t(X.cols());
    if (n < 2 || std::size_t(y.size()) != n) throw std::invalid_argument("fit_ffnn: need at least two rows");

    std::mt19937_64 rng(seed);
    const auto split = validation_split(n, params.validation_fraction, rng);
    const Eigen::MatrixXd Xt = gather_columns(X.transpose(), split.train);
    const Eigen::VectorXd yt = gather(y, split.train);
    Eigen::MatrixXd Xv = gather_columns(X.transpose(), split.validation);
    Xv = Xv.cwiseMax(-params.validation_cap).cwiseMin(params.validation_cap);
    const Eigen::VectorXd yv = gather(y, split.validation);

    Ffnn net = Ffnn::init(d, hidden, rng());
    Adam opt({net.W1.size(), net.b1.size(), net.w2.size(), 1}, AdamParams{params.lr});
    const double keep = 1.0 - params.dropout;
    std::bernoulli_distribution drop(keep);

    EarlyStopping<Ffnn> stop(params.patience);
    std::vector<std::size_t> perm(split.train.size());
    std::iota(perm.begin(), perm.end(), 0);
    Eigen::MatrixXd gW1;
    Eigen::VectorXd gb1, gw2;
    double gb2 = 0.0;
    std::size_t epoch = 0;
    for (; epoch < params.max_epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t start = 0; start < perm.size(); start += params.batch) {
            const std::size_t end = std::min(perm.size(), start + params.batch);
            const std::vector<std::size_t> idx(perm.begin() + std::ptrdiff_t(start), perm.begin() + std::ptrdiff_t(end));
            const Eigen::MatrixXd xb = gather_columns(Xt, idx);
            const Eigen::VectorXd yb = gather(yt, idx);
            Eigen::MatrixXd mask(Eigen::Index(hidden), Eigen::Index(idx.size()));
            for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = drop(rng) ? 1.0 / keep : 0.0;
            const double loss = batch_step(net, xb, yb, params.dropout > 0.0 ? &mask : nullptr, gW1, gb1, gw2, gb2);
            if (!std::isfinite(loss)) throw std::runtime_error("ffnn training diverged (non-finite loss)");
            opt.begin_step();
            opt.update(0, net.W1.data(), gW1.data());
            opt.update(1, net.b1.data(), gb1.data());
            opt.update(2, net.w2.data(), gw2.data());
            opt.update(3, &net.b2, &gb2);
        }
        const Eigen::VectorXd pv = split.validation.empty() ? net.predict(Xt.transpose()) : net.predict(Xv.transpose());
        const Eigen::VectorXd& target = split.validation.empty() ? yt : yv;
        const double mae = (pv - target).cwiseAbs().mean();
        if (!std::isfinite(mae)) throw std::runtime_error("ffnn training diverged (non-finite validation loss)");
        if (stop.observe(mae, net, epoch)) {
            ++epoch;
            break;
        }
    }
    if (report) *report = TrainReport{epoch, stop.best_epoch(), stop.best_loss()};
    return stop.best();
}

}  // namespace stackcast::models
