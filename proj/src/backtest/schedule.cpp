#include "stackcast/backtest/schedule.hpp"

#include <stdexcept>

namespace stackcast::backtest {

std::vector<Date> Schedule::fit_dates() const {
    std::vector<Date> out{warmup_end};
    out.insert(out.end(), update_boundaries.begin(), update_boundaries.end());
    return out;
}

Date Schedule::segment_end(std::size_t i) const {
    return i < update_boundaries.size() ? update_boundaries[i] : range_end;
}

Date years_before(Date d, int years) {
    const std::chrono::year_month_day ymd{d};
    const int y = int(ymd.year()) - years;
    const unsigned m = unsigned(ymd.month());
    unsigned day = unsigned(ymd.day());
    if (m == 2 && day == 29 && !std::chrono::year{y}.is_leap()) day = 28;
    return make_date(y, m, day);
}

Schedule build_schedule(const DateRange& range, models::Update update, int warmup_years) {
    if (range.end <= range.start) throw std::invalid_argument("date range: end must be after start");
    const int y0 = year_of(range.start);
    Schedule s;
    s.warmup_end = end_of_year(y0 + warmup_years - 1);
    s.range_end = range.end;
    s.evaluation_start = make_date(y0 + warmup_years + 1, 1, 1);
    if (year_of(range.end) < y0 + warmup_years) {
        throw std::invalid_argument("date range too short: need " + std::to_string(warmup_years) +
                                    " warm-up years plus one year of predictions, got " + format_date(range.start) +
                                    " to " + format_date(range.end));
    }
    if (update == models::Update::yearly) {
        for (int y = y0 + warmup_years; end_of_year(y) < range.end; ++y) s.update_boundaries.push_back(end_of_year(y));
    } else {
        int y = year_of(s.warmup_end);
        unsigned m = 12;
        for (;;) {
            if (++m > 12) {
                m = 1;
                ++y;
            }
            const Date b = end_of_month(y, m);
            if (b >= range.end) break;
            s.update_boundaries.push_back(b);
        }
    }
    return s;
}

std::optional<Date> window_floor(models::Lookback lookback, Date fit_date) {
    if (lookback == models::Lookback::all_past) return std::nullopt;
    return years_before(fit_date, kRollingYears);
}

}  // namespace stackcast::backtest
