#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "stackcast/models/ffnn.hpp"
#include "stackcast/models/spec.hpp"

namespace stackcast::models {

// One matrix per timestep, oldest first; each is inputs x samples.
using Sequences = std::array<Eigen::MatrixXd, kSequenceLength>;

struct LstmLayer {
    Eigen::MatrixXd Wx;  // 4H x inputs, gate blocks i, f, g, o
    Eigen::MatrixXd Wh;  // 4H x H
    Eigen::VectorXd b;   // 4H
};

struct LstmNet {
    std::vector<LstmLayer> layers;
    Eigen::VectorXd head_w;  // H
    double head_b = 0.0;

    static LstmNet init(std::size_t inputs, std::size_t hidden, std::size_t n_layers, std::uint64_t seed);
    std::size_t inputs() const { return std::size_t(layers.front().Wx.cols()); }
    std::size_t hidden() const { return std::size_t(head_w.size()); }
    std::size_t parameter_count() const;

    // kSequenceLength x samples: the head applied at every step, dropout off.
    Eigen::MatrixXd predict(const Sequences& xs) const;
    // Last layer's hidden states per step, dropout off.
    std::array<Eigen::MatrixXd, kSequenceLength> top_outputs(const Sequences& xs) const;

    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& p);
};

// Dropout masks per layer and step (H x samples), holding 0 or 1/keep.
using LstmMasks = std::vector<std::array<Eigen::MatrixXd, kSequenceLength>>;

// Mean over steps and samples of |output - target|; Y is steps x samples.
double lstm_loss_and_gradient(const LstmNet& net, const Sequences& xs, const Eigen::MatrixXd& Y,
                              Eigen::VectorXd* gradient, const LstmMasks* masks = nullptr);

Sequences frame_to_sequences(const Eigen::MatrixXd& X, std::size_t width);
Sequences gather_sequences(const Sequences& xs, const std::vector<std::size_t>& idx);

LstmNet fit_lstm(const Sequences& xs, const Eigen::MatrixXd& Y, const NetTrainParams& params, std::uint64_t seed,
                 std::size_t n_layers, std::size_t hidden = 32, TrainReport* report = nullptr);

struct FinetuneParams {
    double lr = 1e-4;
    std::size_t epochs = 20;
    std::size_t batch = 256;
    double dropout = 0.6;
};

// Retrains only the head; the recurrent layers are copied bit for bit.
LstmNet finetune_head(const LstmNet& net, const Sequences& xs, const Eigen::MatrixXd& Y, const FinetuneParams& params,
                      std::uint64_t seed);

}  // namespace stackcast::models
