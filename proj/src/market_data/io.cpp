#include "stackcast/market_data/io.hpp"

#include <sstream>

namespace stackcast::market {

namespace {

RawSeries from_table(const CsvTable& t, std::string ticker) {
    const std::size_t c_date = t.column("date"), c_open = t.column("open"), c_high = t.column("high"),
                      c_low = t.column("low"), c_close = t.column("close"),
                      c_adj = t.column("adj_close"), c_vol = t.column("volume"),
                      c_div = t.column("dividend"), c_split = t.column("split");
    RawSeries s{std::move(ticker), {}};
    s.rows.reserve(t.size());
    for (const auto& r : t.rows()) {
        s.rows.push_back({parse_date(r[c_date]), parse_maybe_real(r[c_open]), parse_maybe_real(r[c_high]),
                          parse_maybe_real(r[c_low]), parse_maybe_real(r[c_close]),
                          parse_maybe_real(r[c_adj]), parse_maybe_real(r[c_vol]),
                          parse_maybe_real(r[c_div]), parse_maybe_real(r[c_split])});
    }
    return s;
}

}  // namespace

RawSeries read_daily_csv(const std::filesystem::path& path, std::string ticker) {
    return from_table(CsvTable::read(path), std::move(ticker));
}

RawSeries parse_daily_csv(std::string_view text, std::string ticker) {
    return from_table(CsvTable::parse(text), std::move(ticker));
}

std::string daily_csv(const DailySeries& series) { return daily_csv(to_raw(series)); }

std::string daily_csv(const RawSeries& series) {
    std::ostringstream out;
    out << kDailyHeader << '\n';
    CsvWriter w(out);
    for (const auto& b : series.rows) {
        w.row({format_date(b.date), format_real(b.open), format_real(b.high), format_real(b.low),
               format_real(b.close), format_real(b.adj_close), format_real(b.volume), format_real(b.dividend),
               format_real(b.split)});
    }
    return out.str();
}

std::map<std::string, std::string> read_sector_map(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const std::size_t c_t = t.column("ticker"), c_s = t.column("sector");
    std::map<std::string, std::string> out;
    for (const auto& r : t.rows()) {
        if (!is_known_sector(r[c_s])) {
            throw DataError(path.string() + ": unknown sector '" + r[c_s] + "' for " + r[c_t]);
        }
        out[r[c_t]] = r[c_s];
    }
    return out;
}

std::string weekly_csv(const std::vector<WeeklySeries>& series) {
    std::ostringstream out;
    out << "ticker,sector,week_end,avg_log_adj_close,return\n";
    CsvWriter w(out);
    for (const auto& s : series) {
        for (const auto& p : s.weeks) {
            w.row({s.ticker, s.sector, format_date(p.week_end), format_real(p.avg_log_adj_close),
                   format_real(p.ret)});
        }
    }
    return out.str();
}

std::vector<WeeklySeries> read_weekly_csv(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const std::size_t c_t = t.column("ticker"), c_s = t.column("sector"), c_w = t.column("week_end"),
                      c_a = t.column("avg_log_adj_close"), c_r = t.column("return");
    std::vector<WeeklySeries> out;
    for (const auto& r : t.rows()) {
        if (out.empty() || out.back().ticker != r[c_t]) out.push_back({r[c_t], r[c_s], {}});
        out.back().weeks.push_back({parse_date(r[c_w]), parse_real(r[c_a]), parse_maybe_real(r[c_r])});
    }
    return out;
}

}  // namespace stackcast::market
