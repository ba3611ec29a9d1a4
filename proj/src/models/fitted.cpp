#include "stackcast/models/fitted.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stackcast/common/stats.hpp"
#include "stackcast/models/training.hpp"

namespace stackcast::models {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

MaybeReal as_maybe(double v) { return std::isfinite(v) ? MaybeReal(v) : std::nullopt; }

NetTrainParams net_params(const TrainingBudget& b) {
    NetTrainParams p;
    p.max_epochs = b.max_epochs;
    p.patience = b.patience;
    p.validation_cap = prep::kDefaultCap;
    return p;
}

}  // namespace

std::vector<std::string> column_names(const ModelSpec& spec) {
    std::vector<std::string> out;
    for (auto f : spec.feature_set) out.emplace_back(features::feature_name(f));
    return out;
}

std::size_t min_training_rows(Family family, std::size_t width) {
    switch (family) {
        case Family::arima: return kMinArimaObservations;
        case Family::linear: return width + 1;
        case Family::random_forest: return 100;
        case Family::ffnn: return 500;
        case Family::lstm2:
        case Family::lstm1_finetune: return 100;
    }
    return 1;
}

Eigen::MatrixXd transform_frame(const FeatureFrame& frame, const std::vector<prep::ColumnTransform>& transforms,
                                bool is_test) {
    const std::size_t d = frame.width();
    if (transforms.size() != d) throw std::invalid_argument("transform count does not match the columns");
    Eigen::MatrixXd out(frame.X.rows(), frame.X.cols());
    for (Eigen::Index c = 0; c < frame.X.cols(); ++c) {
        const auto& t = transforms[std::size_t(c) % d];
        for (Eigen::Index r = 0; r < frame.X.rows(); ++r) out(r, c) = prep::apply(as_maybe(frame.X(r, c)), t, is_test);
    }
    return out;
}

FittedModel fit_model(const ModelSpec& spec, const TrainingSet& data, const TrainingBudget& budget,
                      std::uint64_t seed) {
    validate(spec);
    FittedModel m;
    m.model_id = spec.id;
    m.family = spec.family;
    m.columns = column_names(spec);
    m.steps = input_steps(spec.family);

    const FeatureFrame frame = select_columns(data.frame, m.columns);
    if (frame.steps != m.steps) {
        throw std::invalid_argument(spec.id + ": frame has " + std::to_string(frame.steps) + " steps, expected " +
                                    std::to_string(m.steps));
    }
    const std::size_t n = frame.rows();
    const std::size_t need = min_training_rows(spec.family, frame.width());
    if (n < need || std::size_t(data.targets.rows()) != n) {
        throw std::invalid_argument(spec.id + ": " + std::to_string(n) + " training rows, need " + std::to_string(need));
    }

    if (spec.family == Family::arima) {
        const Eigen::VectorXd y = data.targets.col(0);
        m.body = select_arima_order(std::span<const double>(y.data(), std::size_t(y.size())));
        return m;
    }

    // transforms are fitted on the newest step, which holds each sample's own row
    const std::size_t d = frame.width();
    const Eigen::Index last = Eigen::Index((frame.steps - 1) * d);
    m.transforms.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<MaybeReal> col(n);
        for (std::size_t r = 0; r < n; ++r) col[r] = as_maybe(frame.X(Eigen::Index(r), last + Eigen::Index(j)));
        m.transforms[j] = prep::fit_transform_or_constant(col);
    }
    const Eigen::MatrixXd X = transform_frame(frame, m.transforms, false);
    const Eigen::VectorXd y = data.targets.col(data.targets.cols() - 1);

    switch (spec.family) {
        case Family::linear: m.body = fit_linear(X, y); break;
        case Family::random_forest: m.body = fit_random_forest(X, y, {budget.rf_trees, 8}, seed); break;
        case Family::ffnn: m.body = fit_ffnn(X, y, net_params(budget), seed); break;
        case Family::lstm2:
        case Family::lstm1_finetune: {
            const Sequences xs = frame_to_sequences(X, d);
            const Eigen::MatrixXd Y = data.targets.transpose();
            if (Y.rows() != Eigen::Index(kSequenceLength)) throw std::invalid_argument(spec.id + ": need 3 targets per sample");
            const std::size_t layers = spec.family == Family::lstm2 ? 2 : 1;
            LstmNet net = fit_lstm(xs, Y, net_params(budget), seed, layers);
            if (spec.family == Family::lstm2) {
                m.body = std::move(net);
                break;
            }
            FinetunedLstm ft;
            std::map<std::string, std::vector<std::size_t>> by_key;
            for (std::size_t r = 0; r < frame.keys.size(); ++r) by_key[frame.keys[r]].push_back(r);
            FinetuneParams fp;
            fp.epochs = budget.finetune_epochs;
            for (const auto& [key, idx] : by_key) {
                const LstmNet tuned = finetune_head(net, gather_sequences(xs, idx), gather_columns(Y, idx), fp,
                                                    mix_seed(seed, hash_string(key)));
                ft.heads[key] = {tuned.head_w, tuned.head_b};
            }
            ft.base = std::move(net);
            m.body = std::move(ft);
            break;
        }
        case Family::arima: break;
    }
    return m;
}

Eigen::VectorXd predict(const FittedModel& model, const FeatureFrame& frame_in) {
    const FeatureFrame frame = select_columns(frame_in, model.columns);
    if (frame.steps != model.steps) {
        throw std::invalid_argument(model.model_id + ": frame has " + std::to_string(frame.steps) + " steps, expected " +
                                    std::to_string(model.steps));
    }
    const Eigen::Index n = frame.X.rows();
    if (model.family == Family::arima) {
        const auto& a = std::get<ArimaModel>(model.body);
        Eigen::VectorXd out(n);
        std::vector<double> h(std::size_t(frame.X.cols()));
        for (Eigen::Index r = 0; r < n; ++r) {
            for (std::size_t k = 0; k < h.size(); ++k) h[k] = frame.X(r, Eigen::Index(k));
            out(r) = a.forecast(h);
        }
        return out;
    }
    const Eigen::MatrixXd X = transform_frame(frame, model.transforms, true);
    return std::visit(overloaded{
                          [&](const ArimaModel&) -> Eigen::VectorXd { return {}; },
                          [&](const LinearModel& m) -> Eigen::VectorXd { return m.predict(X); },
                          [&](const Forest& m) -> Eigen::VectorXd { return m.predict(X); },
                          [&](const Ffnn& m) -> Eigen::VectorXd { return m.predict(X); },
                          [&](const LstmNet& m) -> Eigen::VectorXd {
                              return m.predict(frame_to_sequences(X, frame.width())).row(kSequenceLength - 1).transpose();
                          },
                          [&](const FinetunedLstm& m) -> Eigen::VectorXd {
                              const auto top = m.base.top_outputs(frame_to_sequences(X, frame.width()));
                              const Eigen::MatrixXd& h = top[kSequenceLength - 1];
                              Eigen::VectorXd out(n);
                              for (Eigen::Index r = 0; r < n; ++r) {
                                  const Eigen::VectorXd* w = &m.base.head_w;
                                  double b = m.base.head_b;
                                  if (std::size_t(r) < frame.keys.size()) {
                                      const auto it = m.heads.find(frame.keys[std::size_t(r)]);
                                      if (it != m.heads.end()) {
                                          w = &it->second.first;
                                          b = it->second.second;
                                      }
                                  }
                                  out(r) = w->dot(h.col(r)) + b;
                              }
                              return out;
                          },
                      },
                      model.body);
}

}  // namespace stackcast::models
