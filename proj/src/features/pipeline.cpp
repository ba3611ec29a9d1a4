#include "stackcast/features/pipeline.hpp"

#include "stackcast/features/indicators.hpp"
#include "stackcast/market_data/weekly.hpp"

namespace stackcast::features {

std::vector<WeeklyFeatureRow> stock_features(const market::DailySeries& series,
                                             std::span<const QuarterlyReport> reports,
                                             const SentimentWeeks& sentiment) {
    const auto indicators = compute_indicators(series);
    const auto fundamentals = compute_fundamentals(series, reports);
    const auto weekly = market::weekly_aggregate(series);
    return weekly_features(indicators, fundamentals, sentiment, weekly);
}

}  // namespace stackcast::features
