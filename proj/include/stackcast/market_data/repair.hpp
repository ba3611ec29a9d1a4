#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stackcast/market_data/types.hpp"

namespace stackcast::market {

inline constexpr std::size_t kMaxMissingRun = 10;

// Half-gap recursive filling: an interior missing value becomes the average of
// its (already filled) predecessor and the next present value; trailing missing
// values repeat the predecessor. Throws DataError when the first value is
// missing and StockRejected when a run of missing values exceeds max_run.
std::vector<double> fill_missing(std::span<const MaybeReal> values,
                                 std::size_t max_run = kMaxMissingRun);

// Union of the dates of both sources, sorted and unique.
std::vector<Date> trading_calendar(const RawSeries& base, const RawSeries& alt);

// Expands the base source onto the calendar (restricted to the base's own date
// range), fills numeric gaps field by field with fill_missing, and returns a
// validated series. Missing dividends become 0 and missing splits 1.
DailySeries repair(const RawSeries& base, std::span<const Date> calendar, std::string sector,
                   std::size_t max_run = kMaxMissingRun);

}  // namespace stackcast::market
