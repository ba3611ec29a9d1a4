#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stackcast/backtest/schedule.hpp"
#include "stackcast/backtest/walk_forward.hpp"
#include "stackcast/models/frame.hpp"

namespace stackcast::ensemble {

inline constexpr std::string_view kIndexTicker = "INDEX";

struct EnsembleOptions {
    std::vector<std::string> base_ids = {"rf", "ffnn", "lstm1_finetune", "lstm2"};
    int window_years = 2;
    bool per_stock = false;  // pooled across stocks by default
    std::string model_id = "ensemble";

    bool index = true;
    std::vector<std::string> index_ids = {"linear", "rf", "ffnn", "lstm2", "lstm1_finetune"};
    int index_window_years = 1;
    std::string index_model_id = "index_ensemble";
};

struct EnsembleFit {
    std::string pool;  // "all", a ticker, or INDEX
    std::vector<std::string> model_ids;
    Eigen::VectorXd weights;
    Date window_start;  // exclusive
    Date window_end;    // the fit date
    std::size_t rows = 0;
    double residual_norm = 0.0;
    std::vector<double> one_hot_residual_norms;
};

struct EnsembleResult {
    std::vector<models::Prediction> predictions;  // ensemble, index medians and index ensemble
    std::vector<backtest::Skip> skips;
    std::vector<EnsembleFit> fits;
    std::vector<EnsembleFit> index_fits;
    std::vector<backtest::Realized> index_realized;
};

double dot(const EnsembleFit& fit, const std::vector<double>& base);

// Median over stocks per model per week; ticker INDEX, model id "median_<id>".
std::vector<models::Prediction> index_features(const std::vector<models::Prediction>& preds,
                                               const std::vector<std::string>& model_ids);

// Equal-weight mean of the constituents' realized returns per week.
std::vector<backtest::Realized> index_realized(const std::vector<backtest::Realized>& realized);

// Refits at every yearly boundary of the schedule on the trailing window of
// (base predictions, realized return) pairs and predicts the weeks up to the
// next boundary. `index_returns`, when non-empty, replaces the equal-weight index.
EnsembleResult run_ensemble(const std::vector<models::Prediction>& base, const std::vector<backtest::Realized>& realized,
                            const backtest::DateRange& range, const EnsembleOptions& options,
                            const std::vector<backtest::Realized>& index_returns = {});

// window_start,window_end,model_id,weight (a leading pool column in per-stock mode)
std::string weights_csv(const std::vector<EnsembleFit>& fits, bool with_pool);

}  // namespace stackcast::ensemble
