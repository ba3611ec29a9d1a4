#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stackcast/common/date.hpp"

namespace stackcast::models {

// Rows of model inputs with named columns. With steps > 1 every row holds
// `steps` consecutive observations laid out oldest first:
// [step0 col0 .. col(d-1) | step1 ... ]. NaN marks "before the series start"
// for the ARIMA history window.
struct FeatureFrame {
    std::vector<std::string> columns;
    std::size_t steps = 1;
    Eigen::MatrixXd X;
    // Ticker of each row; only the per-stock fine-tuned heads look at it.
    std::vector<std::string> keys;

    std::size_t rows() const { return std::size_t(X.rows()); }
    std::size_t width() const { return columns.size(); }
};

// Re-lays a frame onto `wanted` columns; throws std::invalid_argument
// "missing feature column '<name>'" when one is absent.
FeatureFrame select_columns(const FeatureFrame& frame, const std::vector<std::string>& wanted);

struct Prediction {
    std::string ticker;
    Date week_end;  // the week whose return is predicted
    std::string model_id;
    double value = 0.0;
};

// ticker,week_end,model_id,value
std::string predictions_csv(const std::vector<Prediction>& preds);
std::vector<Prediction> parse_predictions_csv(std::string_view text, std::string source = "<memory>");
std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path);

}  // namespace stackcast::models
