#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stackcast/backtest/walk_forward.hpp"
#include "stackcast/features/weekly_features.hpp"
#include "stackcast/models/frame.hpp"

namespace stackcast::metrics {

// "up" means a return >= 0 on both sides. RMSE is the root of the mean squared
// error; mse is kept next to it because the published tables mix the two.
struct Metrics {
    double da = 0.0, uda = 0.0, dda = 0.0;
    double rmse = 0.0, mse = 0.0, mae = 0.0;
    std::size_t n = 0;
};

// Throws std::invalid_argument on a length mismatch or empty input.
Metrics compute_metrics(std::span<const double> realized, std::span<const double> predicted);

struct Joined {
    std::string model_id;
    std::string ticker;
    Date week_end;
    double realized = 0.0;
    double predicted = 0.0;
};

// Inner join on (ticker, week_end), restricted to weeks in [from, to].
std::vector<Joined> join(const std::vector<models::Prediction>& preds, const std::vector<backtest::Realized>& realized,
                         std::optional<Date> from = std::nullopt, std::optional<Date> to = std::nullopt);

// Constant-zero predictions: the "always up" baseline under the >= 0 rule.
std::vector<models::Prediction> always_up(const std::vector<backtest::Realized>& realized, const std::string& model_id);

struct MetricsRecord {
    std::string model_id;
    std::string scope;   // stock | all_stocks | index
    std::string ticker;  // empty for pooled scopes
    std::string period;  // a year or "full"
    Date last_week;      // t of the windowed formulas
    Metrics m;
};

// Per (stock, year) and per stock overall, pooled over stocks per year and
// overall, and the same two for rows whose ticker is `index_ticker`.
std::vector<MetricsRecord> aggregate(const std::vector<Joined>& rows, std::string_view index_ticker = "INDEX");

std::string metrics_csv(const std::vector<MetricsRecord>& records);

struct ThresholdSummary {
    std::size_t n = 0;
    double theta_up = 0.0, theta_down = 0.0;
    double up_frequency = 0.0;               // share with predicted >= theta_up
    std::optional<double> up_realized_rate;  // share of those with realized >= 0
    std::optional<double> up_mean_realized;
    double down_frequency = 0.0;             // share with realized <= theta_down
    std::optional<double> down_accuracy;     // directional accuracy on those rows
    std::optional<double> down_mean_predicted;
};

ThresholdSummary threshold_report(std::span<const Joined> rows, double theta_up, double theta_down);

enum class SlopeGroup { year, company, sector };

struct Slope {
    std::string group;
    double slope = 0.0, intercept = 0.0;
    std::size_t n = 0;
};

struct SlopeSummary {
    std::vector<Slope> slopes;
    std::size_t positive = 0, negative = 0;
    std::vector<std::string> skipped;  // groups with < 3 points or a flat x
};

// OLS of the next week's return on x within each group; rows missing x or the
// target are dropped rather than filled.
SlopeSummary slope_diagnostics(std::span<const features::WeeklyFeatureRow> rows, features::Feature x, SlopeGroup group);

}  // namespace stackcast::metrics
