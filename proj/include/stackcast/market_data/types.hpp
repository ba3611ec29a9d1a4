#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stackcast/common/csv.hpp"
#include "stackcast/common/date.hpp"

namespace stackcast::market {

struct DailyBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;
    double dividend = 0.0;
    double split = 1.0;

    bool operator==(const DailyBar&) const = default;
};

// A source row as read from disk: any field may be empty.
struct RawBar {
    Date date;
    MaybeReal open, high, low, close, adj_close, volume, dividend, split;
};

struct RawSeries {
    std::string ticker;
    std::vector<RawBar> rows;
};

struct DailySeries {
    std::string ticker;
    std::string sector;
    std::vector<DailyBar> bars;
};

struct WeeklyPoint {
    Date week_end;
    double avg_log_adj_close = 0.0;
    MaybeReal ret;  // absent for the first realized week
};

struct WeeklySeries {
    std::string ticker;
    std::string sector;
    std::vector<WeeklyPoint> weeks;
};

// Prices used by the indicator code: open/high/low rescaled by adj_close/close
// so splits and dividends do not create jumps. Volume stays unadjusted.
struct AdjustedBar {
    Date date;
    double open, high, low, close, volume;
};

AdjustedBar adjust(const DailyBar& bar);
std::vector<AdjustedBar> adjust(const DailySeries& series);

inline constexpr std::array<std::string_view, 11> kSectors = {
    "Communication Services", "Consumer Discretionary", "Consumer Staples",
    "Energy",                 "Financials",             "Health Care",
    "Industrials",            "Information Technology", "Materials",
    "Real Estate",            "Utilities"};

bool is_known_sector(std::string_view sector);

// The stock cannot be used at all (gap too long, source disagreement, ...).
class StockRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Throws DataError on duplicate/unsorted dates or a bar violating
// low <= min(open, close) <= max(open, close) <= high, adj_close > 0.
void validate(const DailySeries& series);

}  // namespace stackcast::market
