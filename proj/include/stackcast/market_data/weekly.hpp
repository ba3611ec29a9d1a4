#pragma once

#include "stackcast/market_data/types.hpp"

namespace stackcast::market {

// Groups trading days into Saturday..Friday weeks labelled by their Friday.
// avg_log_adj_close is the mean of log(adj_close) over the week's trading days
// and ret[t] = avg[t] - avg[t-1] across adjacent realized weeks; weeks without
// trading days do not appear. Throws DataError("insufficient history") below
// two weeks.
WeeklySeries weekly_aggregate(const DailySeries& series);

// Keep iff last.week_end - first.week_end spans at least min_years (365.25-day years).
bool filter_history(const WeeklySeries& series, double min_years = 5.0);

}  // namespace stackcast::market
