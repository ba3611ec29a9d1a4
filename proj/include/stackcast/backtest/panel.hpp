#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stackcast/backtest/schedule.hpp"
#include "stackcast/features/weekly_features.hpp"

namespace stackcast::backtest {

struct StockRows {
    std::string ticker;
    std::string sector;
    std::vector<features::WeeklyFeatureRow> rows;  // one per realized week, ascending

    // Week whose return row j's target is: the next realized week, if any.
    std::optional<Date> target_week(std::size_t j) const {
        if (j + 1 < rows.size()) return rows[j + 1].week_end;
        return std::nullopt;
    }
};

struct Panel {
    std::vector<StockRows> stocks;  // sorted by ticker

    std::size_t rows() const;
    std::optional<DateRange> span() const;
};

// Groups rows by ticker and sorts them by week. Throws on duplicate weeks or a
// ticker listed under two sectors.
Panel make_panel(std::vector<features::WeeklyFeatureRow> rows);

// Keeps weeks inside the range and, when a universe is given, only those
// tickers (unknown names are an error).
Panel restrict_panel(const Panel& panel, const DateRange& range, const std::vector<std::string>* universe = nullptr);

}  // namespace stackcast::backtest
