#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stackcast/backtest/panel.hpp"
#include "stackcast/backtest/schedule.hpp"
#include "stackcast/models/container.hpp"
#include "stackcast/models/fitted.hpp"

namespace stackcast::backtest {

enum class SaveModels { none, latest, all };

struct WalkForwardOptions {
    std::vector<models::ModelSpec> specs;
    models::TrainingBudget budget;
    // Fits whose predictions all fall after this date are not run. Used by the
    // no-lookahead check to stop early; the remaining output is unaffected.
    std::optional<Date> horizon;
    SaveModels save_models = SaveModels::latest;
    unsigned workers = 0;  // 0: hardware concurrency
};

struct Skip {
    std::string model_id;
    std::string ticker;
    Date week_end;  // the target week left without a prediction
    std::string reason;
};

struct Realized {
    std::string ticker;
    Date week_end;
    double value = 0.0;
};

// One fit of one spec on one pool (a ticker, a sector or "all") at one date.
struct FitRecord {
    std::string model_id;
    std::string pool;
    Date fit_date;
    std::optional<Date> window_first, window_last;  // target weeks used
    std::size_t rows = 0;
    std::uint64_t window_hash = 0;
    std::vector<std::string> columns;
    std::vector<prep::ColumnTransform> transforms;
    std::string detail;  // arima order, or why the fit was skipped
    bool fitted = false;
};

struct WalkForwardResult {
    std::vector<models::Prediction> predictions;  // ordered by (model_id, ticker, week_end)
    // Latest date each prediction's inputs (training window included) touch.
    std::vector<Date> input_dates;
    std::vector<Skip> skips;
    std::vector<FitRecord> fits;
    std::vector<Realized> realized;  // every target week after the first fit date
    std::vector<models::ModelRecord> models;
};

WalkForwardResult run_walk_forward(const Panel& panel, const DateRange& range, const WalkForwardOptions& options);

// The rows handed to a model for target weeks: raw features laid out per the
// family (3 steps for the LSTMs, a 156-week return window for ARIMA). Returns
// nullopt when row j lacks the history the family needs.
std::optional<models::FeatureFrame> input_frame(const StockRows& stock, std::size_t j, const models::ModelSpec& spec);

// ticker,week_end,return
std::string realized_csv(const std::vector<Realized>& rows);
std::vector<Realized> parse_realized_csv(std::string_view text, std::string source = "<memory>");
std::vector<Realized> read_realized_csv(const std::filesystem::path& path);

// model_id,ticker,week_end,reason
std::string skips_csv(const std::vector<Skip>& rows);

// JSON array of fit records with their transform parameters.
std::string fits_json(const std::vector<FitRecord>& fits);

}  // namespace stackcast::backtest
