#include "stackcast/models/lstm.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "stackcast/models/adam.hpp"
#include "stackcast/models/training.hpp"

namespace stackcast::models {

namespace {

constexpr std::size_t T = kSequenceLength;

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Eigen::MatrixXd tanh_m(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return std::tanh(v); });
}

struct StepCache {
    Eigen::MatrixXd x, h_prev, c_prev, i, f, g, o, c, tc, h;
};

struct LayerCache {
    std::array<StepCache, T> steps;
};

// Runs every layer; `outs` receives the (possibly dropped-out) outputs of the top layer.
std::vector<LayerCache> forward(const LstmNet& net, const Sequences& xs, const LstmMasks* masks,
                                std::array<Eigen::MatrixXd, T>& outs) {
    const Eigen::Index H = Eigen::Index(net.hidden());
    const Eigen::Index B = xs[0].cols();
    std::vector<LayerCache> cache(net.layers.size());
    std::array<Eigen::MatrixXd, T> input = xs;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& L = net.layers[l];
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(H, B), c = Eigen::MatrixXd::Zero(H, B);
        for (std::size_t t = 0; t < T; ++t) {
            auto& s = cache[l].steps[t];
            s.x = input[t];
            s.h_prev = h;
            s.c_prev = c;
            const Eigen::MatrixXd z = ((L.Wx * s.x + L.Wh * h).colwise() + L.b);
            s.i = sigmoid(z.topRows(H));
            s.f = sigmoid(z.middleRows(H, H));
            s.g = tanh_m(z.middleRows(2 * H, H));
            s.o = sigmoid(z.bottomRows(H));
            s.c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
            s.tc = tanh_m(s.c);
            s.h = s.o.cwiseProduct(s.tc);
            h = s.h;
            c = s.c;
            input[t] = masks ? s.h.cwiseProduct((*masks)[l][t]) : s.h;
        }
    }
    outs = input;
    return cache;
}

struct Grad {
    std::vector<LstmLayer> layers;
    Eigen::VectorXd head_w;
    double head_b = 0.0;
};

double loss_grad(const LstmNet& net, const Sequences& xs, const Eigen::MatrixXd& Y, const LstmMasks* masks,
                 Grad* grad) {
    std::array<Eigen::MatrixXd, T> outs;
    const auto cache = forward(net, xs, masks, outs);
    const Eigen::Index B = xs[0].cols();
    const double scale = 1.0 / (double(T) * double(B));
    double loss = 0.0;
    std::array<Eigen::RowVectorXd, T> gy;
    for (std::size_t t = 0; t < T; ++t) {
        const Eigen::RowVectorXd e = (net.head_w.transpose() * outs[t]).array() + net.head_b - Y.row(Eigen::Index(t)).array();
        loss += e.cwiseAbs().sum();
        gy[t] = e.unaryExpr([scale](double v) { return (v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0) * scale; });
    }
    loss *= scale;
    if (!grad) return loss;

    const Eigen::Index H = Eigen::Index(net.hidden());
    grad->head_w = Eigen::VectorXd::Zero(H);
    grad->head_b = 0.0;
    std::array<Eigen::MatrixXd, T> d_out;
    for (std::size_t t = 0; t < T; ++t) {
        grad->head_w += outs[t] * gy[t].transpose();
        grad->head_b += gy[t].sum();
        d_out[t] = net.head_w * gy[t];
    }
    grad->layers.resize(net.layers.size());
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const auto& L = net.layers[l];
        auto& G = grad->layers[l];
        G.Wx = Eigen::MatrixXd::Zero(L.Wx.rows(), L.Wx.cols());
        G.Wh = Eigen::MatrixXd::Zero(L.Wh.rows(), L.Wh.cols());
        G.b = Eigen::VectorXd::Zero(L.b.size());
        Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(H, B), dc_next = Eigen::MatrixXd::Zero(H, B);
        std::array<Eigen::MatrixXd, T> d_in;
        for (std::size_t t = T; t-- > 0;) {
            const auto& s = cache[l].steps[t];
            Eigen::MatrixXd dh = masks ? d_out[t].cwiseProduct((*masks)[l][t]) : d_out[t];
            dh += dh_rec;
            const Eigen::MatrixXd d_o = dh.cwiseProduct(s.tc);
            const Eigen::MatrixXd dc =
                dc_next + dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tc.array().square()).matrix());
            Eigen::MatrixXd dz(4 * H, B);
            dz.topRows(H) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
            dz.middleRows(H, H) = dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
            dz.middleRows(2 * H, H) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
            dz.bottomRows(H) = d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
            G.Wx.noalias() += dz * s.x.transpose();
            G.Wh.noalias() += dz * s.h_prev.transpose();
            G.b += dz.rowwise().sum();
            d_in[t] = L.Wx.transpose() * dz;
            dh_rec = L.Wh.transpose() * dz;
            dc_next = dc.cwiseProduct(s.f);
        }
        d_out = d_in;
    }
    return loss;
}

template <typename Visit>
void visit_params(LstmNet& net, Visit&& v) {
    for (auto& L : net.layers) {
        v(L.Wx.data(), L.Wx.size());
        v(L.Wh.data(), L.Wh.size());
        v(L.b.data(), L.b.size());
    }
    v(net.head_w.data(), net.head_w.size());
    v(&net.head_b, Eigen::Index(1));
}

LstmNet as_net(const Grad& g) {
    LstmNet n;
    n.layers = g.layers;
    n.head_w = g.head_w;
    n.head_b = g.head_b;
    return n;
}

LstmMasks draw_masks(const LstmNet& net, Eigen::Index B, double dropout, std::mt19937_64& rng) {
    const double keep = 1.0 - dropout;
    std::bernoulli_distribution drop(keep);
    LstmMasks m(net.layers.size());
    for (auto& layer : m) {
        for (auto& step : layer) {
            step.resize(Eigen::Index(net.hidden()), B);
            for (Eigen::Index i = 0; i < step.size(); ++i) step.data()[i] = drop(rng) ? 1.0 / keep : 0.0;
        }
    }
    return m;
}

}  // namespace

LstmNet LstmNet::init(std::size_t inputs, std::size_t hidden, std::size_t n_layers, std::uint64_t seed) {
    if (n_layers == 0) throw std::invalid_argument("lstm: need at least one layer");
    std::mt19937_64 rng(seed);
    const auto H = Eigen::Index(hidden);
    auto fill = [&](Eigen::MatrixXd& M, double fan_in) {
        std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
        for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = u(rng);
    };
    LstmNet net;
    std::size_t in = inputs;
    for (std::size_t l = 0; l < n_layers; ++l) {
        LstmLayer L;
        L.Wx.resize(4 * H, Eigen::Index(in));
        L.Wh.resize(4 * H, H);
        fill(L.Wx, double(in));
        fill(L.Wh, double(hidden));
        L.b = Eigen::VectorXd::Zero(4 * H);
        L.b.segment(H, H).setOnes();  // forget gate starts open
        net.layers.push_back(std::move(L));
        in = hidden;
    }
    Eigen::MatrixXd w(H, 1);
    fill(w, double(hidden));
    net.head_w = w.col(0);
    return net;
}

std::size_t LstmNet::parameter_count() const {
    std::size_t n = std::size_t(head_w.size()) + 1;
    for (const auto& L : layers) n += std::size_t(L.Wx.size() + L.Wh.size() + L.b.size());
    return n;
}

Eigen::MatrixXd LstmNet::predict(const Sequences& xs) const {
    if (std::size_t(xs[0].rows()) != inputs()) throw std::invalid_argument("lstm: wrong feature count");
    std::array<Eigen::MatrixXd, T> outs;
    forward(*this, xs, nullptr, outs);
    Eigen::MatrixXd y(Eigen::Index(T), xs[0].cols());
    for (std::size_t t = 0; t < T; ++t) y.row(Eigen::Index(t)) = (head_w.transpose() * outs[t]).array() + head_b;
    return y;
}

std::array<Eigen::MatrixXd, kSequenceLength> LstmNet::top_outputs(const Sequences& xs) const {
    std::array<Eigen::MatrixXd, T> outs;
    forward(*this, xs, nullptr, outs);
    return outs;
}

Eigen::VectorXd LstmNet::flatten() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    visit_params(const_cast<LstmNet&>(*this), [&](double* d, Eigen::Index n) {
        p.segment(k, n) = Eigen::Map<const Eigen::VectorXd>(d, n);
        k += n;
    });
    return p;
}

void LstmNet::unflatten(const Eigen::VectorXd& p) {
    if (p.size() != Eigen::Index(parameter_count())) throw std::invalid_argument("lstm: parameter size mismatch");
    Eigen::Index k = 0;
    visit_params(*this, [&](double* d, Eigen::Index n) {
        Eigen::Map<Eigen::VectorXd>(d, n) = p.segment(k, n);
        k += n;
    });
}

double lstm_loss_and_gradient(const LstmNet& net, const Sequences& xs, const Eigen::MatrixXd& Y,
                              Eigen::VectorXd* gradient, const LstmMasks* masks) {
    if (!gradient) return loss_grad(net, xs, Y, masks, nullptr);
    Grad g;
    const double loss = loss_grad(net, xs, Y, masks, &g);
    *gradient = as_net(g).flatten();
    return loss;
}

Sequences frame_to_sequences(const Eigen::MatrixXd& X, std::size_t width) {
    if (std::size_t(X.cols()) != width * T) throw std::invalid_argument("sequence frame has the wrong width");
    Sequences xs;
    for (std::size_t t = 0; t < T; ++t) xs[t] = X.middleCols(Eigen::Index(t * width), Eigen::Index(width)).transpose();
    return xs;
}

Sequences gather_sequences(const Sequences& xs, const std::vector<std::size_t>& idx) {
    Sequences out;
    for (std::size_t t = 0; t < T; ++t) out[t] = gather_columns(xs[t], idx);
    return out;
}

LstmNet fit_lstm(const Sequences& xs, const Eigen::MatrixXd& Y, const NetTrainParams& params, std::uint64_t seed,
                 std::size_t n_layers, std::size_t hidden, TrainReport* report) {
    const std::size_t n = std::size_t(xs[0].cols());
    if (n < 2 || std::size_t(Y.cols()) != n || Y.rows() != Eigen::Index(T)) {
        throw std::invalid_argument("fit_lstm: bad training shapes");
    }
    std::mt19937_64 rng(seed);
    const auto split = validation_split(n, params.validation_fraction, rng);
    const Sequences xt = gather_sequences(xs, split.train);
    const Eigen::MatrixXd yt = gather_columns(Y, split.train);
    Sequences xv = gather_sequences(xs, split.validation);
    for (auto& m : xv) m = m.cwiseMax(-params.validation_cap).cwiseMin(params.validation_cap);
    const Eigen::MatrixXd yv = gather_columns(Y, split.validation);

    LstmNet net = LstmNet::init(std::size_t(xs[0].rows()), hidden, n_layers, rng());
    std::vector<Eigen::Index> sizes;
    visit_params(net, [&](double*, Eigen::Index k) { sizes.push_back(k); });
    Adam opt(sizes, AdamParams{params.lr});

    EarlyStopping<LstmNet> stop(params.patience);
    std::vector<std::size_t> perm(split.train.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t epoch = 0;
    for (; epoch < params.max_epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t start = 0; start < perm.size(); start += params.batch) {
            const std::size_t end = std::min(perm.size(), start + params.batch);
            const std::vector<std::size_t> idx(perm.begin() + std::ptrdiff_t(start), perm.begin() + std::ptrdiff_t(end));
            const Sequences xb = gather_sequences(xt, idx);
            const Eigen::MatrixXd yb = gather_columns(yt, idx);
            const LstmMasks masks = draw_masks(net, Eigen::Index(idx.size()), params.dropout, rng);
            Grad g;
            const double loss = loss_grad(net, xb, yb, params.dropout > 0.0 ? &masks : nullptr, &g);
            if (!std::isfinite(loss)) throw std::runtime_error("lstm training diverged (non-finite loss)");
            LstmNet gn = as_net(g);
            std::vector<double*> grads;
            visit_params(gn, [&](double* d, Eigen::Index) { grads.push_back(d); });
            opt.begin_step();
            std::size_t b = 0;
            visit_params(net, [&](double* d, Eigen::Index) {
                opt.update(b, d, grads[b]);
                ++b;
            });
        }
        const double mae = split.validation.empty() ? loss_grad(net, xt, yt, nullptr, nullptr)
                                                    : loss_grad(net, xv, yv, nullptr, nullptr);
        if (!std::isfinite(mae)) throw std::runtime_error("lstm training diverged (non-finite validation loss)");
        if (stop.observe(mae, net, epoch)) {
            ++epoch;
            break;
        }
    }
    if (report) *report = TrainReport{epoch, stop.best_epoch(), stop.best_loss()};
    return stop.best();
}

LstmNet finetune_head(const LstmNet& base, const Sequences& xs, const Eigen::MatrixXd& Y, const FinetuneParams& params,
                      std::uint64_t seed) {
    const std::size_t n = std::size_t(xs[0].cols());
    LstmNet net = base;
    if (n == 0) return net;
    std::mt19937_64 rng(seed);
    // The frozen layers give the same hidden states every pass.
    const auto hs = base.top_outputs(xs);
    const Eigen::Index H = Eigen::Index(base.hidden());
    const double keep = 1.0 - params.dropout;
    std::bernoulli_distribution drop(keep);
    Adam opt({H, 1}, AdamParams{params.lr});
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t start = 0; start < n; start += params.batch) {
            const std::size_t end = std::min(n, start + params.batch);
            const std::vector<std::size_t> idx(perm.begin() + std::ptrdiff_t(start), perm.begin() + std::ptrdiff_t(end));
            const Eigen::Index B = Eigen::Index(idx.size());
            const double scale = 1.0 / (double(T) * double(B));
            Eigen::VectorXd gw = Eigen::VectorXd::Zero(H);
            double gb = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                Eigen::MatrixXd h = gather_columns(hs[t], idx);
                if (params.dropout > 0.0) {
                    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] *= drop(rng) ? 1.0 / keep : 0.0;
                }
                const Eigen::RowVectorXd e = (net.head_w.transpose() * h).array() + net.head_b -
                                             gather_columns(Y.row(Eigen::Index(t)), idx).array();
                const Eigen::RowVectorXd g =
                    e.unaryExpr([scale](double v) { return (v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0) * scale; });
                gw += h * g.transpose();
                gb += g.sum();
            }
            opt.begin_step();
            opt.update(0, net.head_w.data(), gw.data());
            opt.update(1, &net.head_b, &gb);
        }
    }
    return net;
}

}  // namespace stackcast::models
