#include "stackcast/market_data/ingest.hpp"

#include <set>

#include "stackcast/market_data/weekly.hpp"

namespace stackcast::market {

namespace {

// Base rows with every price field present, for comparison only.
DailySeries complete_rows(const RawSeries& raw, const std::string& sector) {
    DailySeries s{raw.ticker, sector, {}};
    for (const auto& r : raw.rows) {
        if (!r.open || !r.high || !r.low || !r.close || !r.adj_close || !r.volume) continue;
        s.bars.push_back({r.date, *r.open, *r.high, *r.low, *r.close, *r.adj_close, *r.volume, r.dividend.value_or(0.0),
                          r.split.value_or(1.0)});
    }
    return s;
}

}  // namespace

IngestResult ingest_stock(const RawSeries& base, const RawSeries* alt, const std::string& sector,
                          const IngestOptions& options) {
    IngestResult out;
    out.ticker = base.ticker;
    try {
        RawSeries cleaned = base;
        if (alt) {
            const auto compared = complete_rows(base, sector);
            auto [kept, rep] = reconcile(compared, *alt, options.reconcile);
            out.report = rep;
            if (rep.stock_rejected) {
                out.reason = "sources disagree on " + format_real(100.0 * rep.violation_fraction) + "% of matched rows";
                return out;
            }
            std::set<Date> kept_dates;
            for (const auto& b : kept.bars) kept_dates.insert(b.date);
            std::set<Date> dropped;
            for (const auto& b : compared.bars) {
                if (!kept_dates.count(b.date)) dropped.insert(b.date);
            }
            std::erase_if(cleaned.rows, [&](const RawBar& r) { return dropped.count(r.date) > 0; });
        }
        const auto calendar = trading_calendar(cleaned, alt ? *alt : RawSeries{base.ticker, {}});
        out.daily = repair(cleaned, calendar, sector, options.max_missing_run);
        out.weekly = weekly_aggregate(out.daily);
        if (!filter_history(out.weekly, options.min_years)) {
            out.reason = "less than " + format_real(options.min_years) + " years of history";
            return out;
        }
        out.kept = true;
    } catch (const std::runtime_error& e) {
        out.reason = e.what();
    }
    return out;
}

}  // namespace stackcast::market
