#include "stackcast/backtest/panel.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace stackcast::backtest {

std::size_t Panel::rows() const {
    std::size_t n = 0;
    for (const auto& s : stocks) n += s.rows.size();
    return n;
}

std::optional<DateRange> Panel::span() const {
    std::optional<DateRange> out;
    for (const auto& s : stocks) {
        if (s.rows.empty()) continue;
        const Date a = s.rows.front().week_end, b = s.rows.back().week_end;
        if (!out) {
            out = DateRange{a, b};
        } else {
            out->start = std::min(out->start, a);
            out->end = std::max(out->end, b);
        }
    }
    return out;
}

Panel make_panel(std::vector<features::WeeklyFeatureRow> rows) {
    std::map<std::string, StockRows> by;
    for (auto& r : rows) {
        auto& s = by[r.ticker];
        if (s.ticker.empty()) {
            s.ticker = r.ticker;
            s.sector = r.sector;
        } else if (s.sector != r.sector) {
            throw std::invalid_argument("ticker " + r.ticker + " listed under sectors '" + s.sector + "' and '" +
                                        r.sector + "'");
        }
        s.rows.push_back(std::move(r));
    }
    Panel p;
    for (auto& [t, s] : by) {
        std::sort(s.rows.begin(), s.rows.end(), [](const auto& a, const auto& b) { return a.week_end < b.week_end; });
        for (std::size_t j = 1; j < s.rows.size(); ++j) {
            if (s.rows[j].week_end == s.rows[j - 1].week_end) {
                throw std::invalid_argument("ticker " + t + " has two rows for week " + format_date(s.rows[j].week_end));
            }
        }
        p.stocks.push_back(std::move(s));
    }
    return p;
}

Panel restrict_panel(const Panel& panel, const DateRange& range, const std::vector<std::string>* universe) {
    std::set<std::string> keep;
    if (universe) {
        keep.insert(universe->begin(), universe->end());
        for (const auto& t : keep) {
            const bool known = std::any_of(panel.stocks.begin(), panel.stocks.end(),
                                           [&](const StockRows& s) { return s.ticker == t; });
            if (!known) throw std::invalid_argument("universe ticker '" + t + "' has no feature rows");
        }
    }
    Panel out;
    for (const auto& s : panel.stocks) {
        if (universe && !keep.count(s.ticker)) continue;
        StockRows r{s.ticker, s.sector, {}};
        for (const auto& row : s.rows) {
            if (row.week_end >= range.start && row.week_end <= range.end) r.rows.push_back(row);
        }
        if (!r.rows.empty()) out.stocks.push_back(std::move(r));
    }
    return out;
}

}  // namespace stackcast::backtest
