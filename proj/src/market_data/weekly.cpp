#include "stackcast/market_data/weekly.hpp"

#include <cmath>

namespace stackcast::market {

WeeklySeries weekly_aggregate(const DailySeries& series) {
    WeeklySeries out{series.ticker, series.sector, {}};
    double sum = 0.0;
    std::size_t count = 0;
    Date current{};
    auto flush = [&] {
        if (count == 0) return;
        WeeklyPoint p{current, sum / double(count), std::nullopt};
        if (!out.weeks.empty()) p.ret = p.avg_log_adj_close - out.weeks.back().avg_log_adj_close;
        out.weeks.push_back(p);
    };
    for (const auto& b : series.bars) {
        if (!(b.adj_close > 0.0)) throw DataError(series.ticker + ": non-positive adj_close");
        const Date wk = week_ending_friday(b.date);
        if (count > 0 && wk != current) {
            flush();
            sum = 0.0;
            count = 0;
        }
        current = wk;
        sum += std::log(b.adj_close);
        ++count;
    }
    flush();
    if (out.weeks.size() < 2) throw DataError(series.ticker + ": insufficient history");
    return out;
}

bool filter_history(const WeeklySeries& series, double min_years) {
    if (series.weeks.empty()) return false;
    return years_between(series.weeks.front().week_end, series.weeks.back().week_end) >= min_years;
}

}  // namespace stackcast::market
