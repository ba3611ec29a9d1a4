#pragma once

#include <span>
#include <vector>

#include "stackcast/features/fundamentals.hpp"
#include "stackcast/features/weekly_features.hpp"
#include "stackcast/market_data/types.hpp"

namespace stackcast::features {

// Indicators, fundamentals and weekly aggregation for one cleaned stock.
std::vector<WeeklyFeatureRow> stock_features(const market::DailySeries& series,
                                             std::span<const QuarterlyReport> reports,
                                             const SentimentWeeks& sentiment);

}  // namespace stackcast::features
