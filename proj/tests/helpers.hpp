#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "stackcast/market_data/types.hpp"

namespace testutil {

using stackcast::Date;
using stackcast::market::DailyBar;
using stackcast::market::DailySeries;

inline DailyBar flat_bar(Date d, double price, double volume = 1000.0) {
    return DailyBar{d, price, price, price, price, price, volume, 0.0, 1.0};
}

// Weekday calendar starting at `start`.
inline std::vector<Date> weekdays(Date start, std::size_t n) {
    std::vector<Date> out;
    for (Date d = start; out.size() < n; d += std::chrono::days{1}) {
        if (stackcast::is_weekday(d)) out.push_back(d);
    }
    return out;
}

inline DailySeries series_from_closes(const std::vector<double>& closes, Date start = stackcast::make_date(2020, 1, 6)) {
    DailySeries s{"TST", "Energy", {}};
    const auto days = weekdays(start, closes.size());
    for (std::size_t i = 0; i < closes.size(); ++i) s.bars.push_back(flat_bar(days[i], closes[i]));
    return s;
}

// Random but valid bars: positive prices, low <= open/close <= high.
inline DailySeries random_series(std::mt19937_64& rng, std::size_t n, Date start = stackcast::make_date(2015, 1, 5)) {
    std::normal_distribution<double> step(0.0, 0.02);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DailySeries s{"RND", "Utilities", {}};
    const auto days = weekdays(start, n);
    double c = 50.0 * std::exp(step(rng) * 20.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double o = c * std::exp(step(rng));
        c = o * std::exp(step(rng));
        const double hi = std::max(o, c) * (1.0 + 0.02 * u(rng));
        const double lo = std::min(o, c) * (1.0 - 0.02 * u(rng));
        const double vol = u(rng) < 0.02 ? 0.0 : std::floor(1e6 * u(rng));
        s.bars.push_back(DailyBar{days[i], o, hi, lo, c, c * 0.97, vol, 0.0, 1.0});
    }
    return s;
}

}  // namespace testutil
