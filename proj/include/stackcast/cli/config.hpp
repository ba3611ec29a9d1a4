#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackcast/backtest/schedule.hpp"
#include "stackcast/backtest/walk_forward.hpp"
#include "stackcast/ensemble/stacking.hpp"
#include "stackcast/features/weekly_features.hpp"
#include "stackcast/market_data/ingest.hpp"
#include "stackcast/models/spec.hpp"
#include "stackcast/text_linking/linking.hpp"

namespace stackcast::cli {

// A bad or missing setting. The message starts with the field name.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kRunRootEnv = "STACKCAST_RUN_ROOT";

struct Paths {
    std::filesystem::path prices;      // directory of <TICKER>.csv, the base source
    std::filesystem::path alt_prices;  // optional second source, same layout
    std::filesystem::path sectors;     // ticker,sector
    std::filesystem::path reports;     // optional quarterly reports
    std::filesystem::path sentiment;   // optional weekly sentiment
    std::filesystem::path scored_articles;  // optional per-article scores, reduced to weekly medians
    std::filesystem::path articles;    // link: JSON lines
    std::filesystem::path embeddings;  // link: token vectors
    std::filesystem::path names;       // link: ticker,name
    std::filesystem::path rules;       // link: optional synonym rules
};

struct ReportOptions {
    double theta_up = 0.02;
    double theta_down = -0.02;
    features::Feature slope_feature = features::Feature::sentiment;
};

struct RunConfig {
    std::filesystem::path config_dir;
    std::uint64_t seed = 0;
    std::filesystem::path run_dir;  // resolved
    Paths paths;
    std::optional<std::vector<std::string>> universe;
    std::optional<backtest::DateRange> range;
    std::vector<models::ModelSpec> specs;
    models::TrainingBudget budget;
    backtest::SaveModels save_models = backtest::SaveModels::latest;
    unsigned workers = 0;
    market::IngestOptions ingest;
    text::MatchOptions link;
    ensemble::EnsembleOptions ensemble;
    ReportOptions report;
};

// Reads a JSON config. Relative paths resolve against the config's directory;
// a relative run_dir resolves against $STACKCAST_RUN_ROOT when set. Unknown
// keys, wrong types, a missing seed and paths that do not exist are errors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& config_dir);

// Resolves a run directory given on the command line.
std::filesystem::path resolve_run_dir(const std::filesystem::path& dir, const std::filesystem::path& base);

const backtest::DateRange& require_range(const RunConfig& config);

// JSON that, with the input files, fully determines a backtest run.
std::string manifest_json(const RunConfig& config, const std::vector<std::string>& universe);

}  // namespace stackcast::cli
