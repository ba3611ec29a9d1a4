#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stackcast/features/weekly_features.hpp"

namespace stackcast::models {

enum class Family { arima, linear, random_forest, ffnn, lstm2, lstm1_finetune };
enum class Scope { per_stock, per_sector, all_stock };
enum class Lookback { all_past, rolling_10y };
enum class Update { yearly, monthly };

std::string_view to_string(Family f);
std::string_view to_string(Scope s);
std::string_view to_string(Lookback l);
std::string_view to_string(Update u);
std::optional<Family> family_from_string(std::string_view s);
std::optional<Scope> scope_from_string(std::string_view s);
std::optional<Lookback> lookback_from_string(std::string_view s);
std::optional<Update> update_from_string(std::string_view s);

// Training effort knobs. Defaults are the full settings; tests and the
// no-lookahead check run with smaller budgets.
struct TrainingBudget {
    std::size_t rf_trees = 400;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    std::size_t finetune_epochs = 20;
};

struct ModelSpec {
    std::string id;
    Family family = Family::linear;
    Scope scope = Scope::all_stock;
    Lookback lookback = Lookback::all_past;
    Update update = Update::yearly;
    std::vector<features::Feature> feature_set;
    std::uint64_t seed = 0;
};

// The input columns each family is defined on.
std::vector<features::Feature> default_features(Family f);

// The six base configurations, ids: arima, linear, rf, ffnn, lstm2, lstm1_finetune.
std::vector<ModelSpec> default_specs(std::uint64_t seed);

// Throws std::invalid_argument naming the offending field.
void validate(const ModelSpec& spec);

// Sequence length fed to the recurrent models.
inline constexpr std::size_t kSequenceLength = 3;
// Trailing window of returns handed to ARIMA forecasts.
inline constexpr std::size_t kArimaWindow = 156;

std::size_t input_steps(Family f);

}  // namespace stackcast::models
