#pragma once

#include <vector>

#include "stackcast/common/date.hpp"
#include "stackcast/models/spec.hpp"

namespace stackcast::backtest {

struct DateRange {
    Date start;
    Date end;
};

inline constexpr int kWarmupYears = 2;
inline constexpr int kRollingYears = 10;

// The first fit happens at the end of the warm-up (end of the second calendar
// year) and its predictions cover year three. Refits follow at every yearly or
// month-end boundary strictly before the range end. Year three's predictions
// only feed the first ensemble fit, so scoring starts with year four.
struct Schedule {
    Date warmup_end;
    std::vector<Date> update_boundaries;
    Date range_end;
    Date evaluation_start;

    // warmup_end followed by the update boundaries.
    std::vector<Date> fit_dates() const;
    // (fit_dates()[i], next fit date or range_end]
    Date segment_end(std::size_t i) const;
};

// Throws std::invalid_argument when the range holds less than the warm-up plus one year.
Schedule build_schedule(const DateRange& range, models::Update update, int warmup_years = kWarmupYears);

// Exclusive lower bound on the target week of training rows, or nullopt for
// all past data. A ten-year window longer than the history simply takes all of it.
std::optional<Date> window_floor(models::Lookback lookback, Date fit_date);

// Same calendar day `years` earlier; Feb 29 falls back to Feb 28.
Date years_before(Date d, int years);

}  // namespace stackcast::backtest
