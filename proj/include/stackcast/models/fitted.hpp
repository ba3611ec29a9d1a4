#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "stackcast/models/arima.hpp"
#include "stackcast/models/ffnn.hpp"
#include "stackcast/models/forest.hpp"
#include "stackcast/models/frame.hpp"
#include "stackcast/models/linear.hpp"
#include "stackcast/models/lstm.hpp"
#include "stackcast/models/spec.hpp"
#include "stackcast/preprocess/yeo_johnson.hpp"

namespace stackcast::models {

// One shared recurrent layer plus a head per ticker.
struct FinetunedLstm {
    LstmNet base;
    std::map<std::string, std::pair<Eigen::VectorXd, double>> heads;
};

using ModelBody = std::variant<ArimaModel, LinearModel, Forest, Ffnn, LstmNet, FinetunedLstm>;

// A fitted model together with the column transforms of its training window.
// Feed predict() raw feature values (NaN = missing); it transforms and caps.
struct FittedModel {
    std::string model_id;
    Family family = Family::linear;
    std::vector<std::string> columns;
    std::size_t steps = 1;
    std::vector<prep::ColumnTransform> transforms;  // one per column; empty for arima
    ModelBody body;
};

// Raw training data for one fit. Rows of frame.X are samples; targets has
// one column per output step (3 for the recurrent models, else 1). For ARIMA
// the targets column, in time order, is the return series itself.
struct TrainingSet {
    FeatureFrame frame;
    Eigen::MatrixXd targets;
};

std::vector<std::string> column_names(const ModelSpec& spec);

// Throws std::invalid_argument when the data do not meet the family's minimum.
FittedModel fit_model(const ModelSpec& spec, const TrainingSet& data, const TrainingBudget& budget,
                      std::uint64_t seed);

// Minimum training samples per family.
std::size_t min_training_rows(Family family, std::size_t width);

// One value per frame row, dropout off. Throws naming a missing column.
Eigen::VectorXd predict(const FittedModel& model, const FeatureFrame& frame);

// Transformed model inputs exactly as the fit sees them.
Eigen::MatrixXd transform_frame(const FeatureFrame& frame, const std::vector<prep::ColumnTransform>& transforms,
                                bool is_test);

}  // namespace stackcast::models
