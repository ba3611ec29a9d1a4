#include "stackcast/market_data/repair.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace stackcast::market {

std::vector<double> fill_missing(std::span<const MaybeReal> values, std::size_t max_run) {
    const std::size_t n = values.size();
    if (n == 0) return {};
    if (!values[0]) throw DataError("fill_missing: first value is missing");

    std::size_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
        run = values[i] ? 0 : run + 1;
        if (run > max_run) {
            throw StockRejected("more than " + std::to_string(max_run) +
                                " consecutive missing values ending at position " + std::to_string(i));
        }
    }

    std::vector<MaybeReal> a(values.begin(), values.end());
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t j = i;
        while (!a[i]) {
            ++j;
            if (j >= n) {
                a[i] = a[i - 1];
            } else if (a[j]) {
                a[i] = (*a[i - 1] + *a[j]) / 2.0;
            }
        }
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = *a[i];
    return out;
}

std::vector<Date> trading_calendar(const RawSeries& base, const RawSeries& alt) {
    std::vector<Date> dates;
    dates.reserve(base.rows.size() + alt.rows.size());
    for (const auto& r : base.rows) dates.push_back(r.date);
    for (const auto& r : alt.rows) dates.push_back(r.date);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    return dates;
}

DailySeries repair(const RawSeries& base, std::span<const Date> calendar, std::string sector,
                   std::size_t max_run) {
    if (base.rows.empty()) throw DataError(base.ticker + ": no rows");

    std::map<Date, const RawBar*> by_date;
    for (const auto& r : base.rows) {
        if (!by_date.emplace(r.date, &r).second) {
            throw DataError(base.ticker + ": duplicate date " + format_date(r.date));
        }
    }
    const Date first = by_date.begin()->first;
    const Date last = by_date.rbegin()->first;

    std::vector<Date> dates;
    for (Date d : calendar) {
        if (d >= first && d <= last) dates.push_back(d);
    }
    for (const auto& [d, _] : by_date) dates.push_back(d);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

    const std::size_t n = dates.size();
    constexpr std::size_t kFields = 6;
    std::array<std::vector<MaybeReal>, kFields> cols;
    for (auto& c : cols) c.resize(n);
    std::vector<bool> touched(n, false);
    std::vector<double> dividend(n, 0.0), split(n, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        auto it = by_date.find(dates[i]);
        if (it == by_date.end()) {
            touched[i] = true;
            continue;
        }
        const RawBar& r = *it->second;
        const std::array<MaybeReal, kFields> f{r.open, r.high, r.low, r.close, r.adj_close, r.volume};
        for (std::size_t k = 0; k < kFields; ++k) {
            cols[k][i] = f[k];
            if (!f[k]) touched[i] = true;
        }
        dividend[i] = r.dividend.value_or(0.0);
        split[i] = r.split.value_or(1.0);
    }

    std::array<std::vector<double>, kFields> filled;
    for (std::size_t k = 0; k < kFields; ++k) {
        try {
            filled[k] = fill_missing(cols[k], max_run);
        } catch (const StockRejected& e) {
            throw StockRejected(base.ticker + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(base.ticker + ": " + e.what());
        }
    }

    DailySeries out{base.ticker, std::move(sector), {}};
    out.bars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DailyBar b{dates[i], filled[0][i], filled[1][i], filled[2][i], filled[3][i],
                   filled[4][i], filled[5][i], dividend[i], split[i]};
        if (touched[i]) {
            // Fields filled independently can leave the bar slightly inconsistent.
            b.high = std::max({b.high, b.open, b.close, b.low});
            b.low = std::min({b.low, b.open, b.close});
        }
        out.bars.push_back(b);
    }
    validate(out);
    return out;
}

}  // namespace stackcast::market
