#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stackcast/features/fundamentals.hpp"
#include "stackcast/features/indicators.hpp"
#include "stackcast/market_data/types.hpp"

namespace stackcast::features {

enum class Feature : std::size_t { ret, sentiment, pe, ps, pb, cci, macdh, rsi, kdj_k, wr, atr_pct, cmf };
inline constexpr std::size_t kFeatureCount = 12;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "return", "sentiment", "pe", "ps", "pb", "cci", "macdh", "rsi", "kdj_k", "wr", "atr_pct", "cmf"};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name);

struct WeeklyFeatureRow {
    std::string ticker;
    std::string sector;
    Date week_end;
    std::array<MaybeReal, kFeatureCount> x{};
    MaybeReal target;  // return of the next realized week

    MaybeReal& operator[](Feature f) { return x[static_cast<std::size_t>(f)]; }
    const MaybeReal& operator[](Feature f) const { return x[static_cast<std::size_t>(f)]; }
};

// week_end (a Friday) -> weekly sentiment score
using SentimentWeeks = std::map<Date, double>;

// One row per realized week. Daily indicator and fundamental values are
// reduced to the week's median over present values; weeks with none stay
// missing. return is the week's realized return, target the following one.
std::vector<WeeklyFeatureRow> weekly_features(std::span<const IndicatorRow> indicators,
                                              std::span<const FundamentalRow> fundamentals,
                                              const SentimentWeeks& sentiment,
                                              const market::WeeklySeries& weekly);

// ticker,week_end,sentiment with sentiment in [-1, 1]; non-Friday dates are
// moved to the Friday closing their week. Duplicates for one week are an error.
std::map<std::string, SentimentWeeks> read_sentiment_csv(const std::filesystem::path& path);
std::map<std::string, SentimentWeeks> parse_sentiment_csv(std::string_view text, std::string source = "<memory>");

// One scored article: ticker,article_id,publish_date,p_pos,p_neg,p_neutral,score.
// Probabilities must be >= 0 and sum to 1 within 1e-6, score = p_pos - p_neg.
struct ScoredArticle {
    std::string ticker;
    std::string article_id;
    Date publish_date;
    double p_pos = 0.0, p_neg = 0.0, p_neutral = 0.0, score = 0.0;
};
std::vector<ScoredArticle> parse_scored_articles_csv(std::string_view text, std::string source = "<memory>");
std::vector<ScoredArticle> read_scored_articles_csv(const std::filesystem::path& path);

// Median score per ticker per Friday-ended week; weeks without articles are absent.
std::map<std::string, SentimentWeeks> weekly_sentiment(std::span<const ScoredArticle> articles);

// ticker,week_end,sentiment
std::string sentiment_csv(const std::map<std::string, SentimentWeeks>& weeks);

// ticker,sector,week_end,<kFeatureNames...>,target
std::string feature_csv_header();
std::string features_csv(std::span<const WeeklyFeatureRow> rows);
std::vector<WeeklyFeatureRow> read_features_csv(const std::filesystem::path& path);
std::vector<WeeklyFeatureRow> parse_features_csv(std::string_view text, std::string source = "<memory>");

}  // namespace stackcast::features
