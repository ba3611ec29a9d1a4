#include "stackcast/features/weekly_features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stackcast/common/stats.hpp"

namespace stackcast::features {

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) return static_cast<Feature>(i);
    }
    return std::nullopt;
}

namespace {

struct DailyValues {
    std::array<std::vector<double>, kFeatureCount> v;
    void add(Feature f, const MaybeReal& x) {
        if (x) v[static_cast<std::size_t>(f)].push_back(*x);
    }
};

}  // namespace

std::vector<WeeklyFeatureRow> weekly_features(std::span<const IndicatorRow> indicators,
                                              std::span<const FundamentalRow> fundamentals,
                                              const SentimentWeeks& sentiment,
                                              const market::WeeklySeries& weekly) {
    std::map<Date, DailyValues> by_week;
    for (const auto& r : indicators) {
        auto& d = by_week[week_ending_friday(r.date)];
        d.add(Feature::cci, r.cci);
        d.add(Feature::macdh, r.macdh);
        d.add(Feature::rsi, r.rsi);
        d.add(Feature::kdj_k, r.kdj_k);
        d.add(Feature::wr, r.wr);
        d.add(Feature::atr_pct, r.atr_pct);
        d.add(Feature::cmf, r.cmf);
    }
    for (const auto& r : fundamentals) {
        auto& d = by_week[week_ending_friday(r.date)];
        d.add(Feature::pe, r.pe);
        d.add(Feature::pb, r.pb);
        d.add(Feature::ps, r.ps);
    }

    std::vector<WeeklyFeatureRow> out;
    out.reserve(weekly.weeks.size());
    for (std::size_t t = 0; t < weekly.weeks.size(); ++t) {
        const auto& w = weekly.weeks[t];
        WeeklyFeatureRow row;
        row.ticker = weekly.ticker;
        row.sector = weekly.sector;
        row.week_end = w.week_end;
        row[Feature::ret] = w.ret;
        if (auto it = sentiment.find(w.week_end); it != sentiment.end()) row[Feature::sentiment] = it->second;
        if (auto it = by_week.find(w.week_end); it != by_week.end()) {
            for (std::size_t k = 0; k < kFeatureCount; ++k) {
                auto& vals = it->second.v[k];
                if (!vals.empty()) row.x[k] = median(vals);
            }
        }
        if (t + 1 < weekly.weeks.size()) row.target = weekly.weeks[t + 1].ret;
        out.push_back(std::move(row));
    }
    return out;
}

std::map<std::string, SentimentWeeks> parse_sentiment_csv(std::string_view text, std::string source) {
    const auto table = CsvTable::parse(text, source);
    const auto c_ticker = table.column("ticker");
    const auto c_week = table.column("week_end");
    const auto c_score = table.column("sentiment");
    std::map<std::string, SentimentWeeks> out;
    std::size_t line = 1;
    for (const auto& r : table.rows()) {
        ++line;
        const auto where = [&] { return source + ":" + std::to_string(line) + ": "; };
        const auto score = parse_maybe_real(r[c_score]);
        if (!score) continue;
        if (!(*score >= -1.0 && *score <= 1.0)) throw std::runtime_error(where() + "sentiment outside [-1, 1]");
        const Date week = week_ending_friday(parse_date(r[c_week]));
        if (!out[r[c_ticker]].emplace(week, *score).second) {
            throw std::runtime_error(where() + "duplicate sentiment for " + r[c_ticker] + " week " + format_date(week));
        }
    }
    return out;
}

std::map<std::string, SentimentWeeks> read_sentiment_csv(const std::filesystem::path& path) {
    return parse_sentiment_csv(read_text_file(path), path.string());
}

std::vector<ScoredArticle> parse_scored_articles_csv(std::string_view text, std::string source) {
    const auto table = CsvTable::parse(text, source);
    const auto ct = table.column("ticker"), ci = table.column("article_id"), cd = table.column("publish_date");
    const auto cp = table.column("p_pos"), cn = table.column("p_neg"), cu = table.column("p_neutral");
    const auto cs = table.column("score");
    std::vector<ScoredArticle> out;
    std::size_t line = 1;
    for (const auto& r : table.rows()) {
        ++line;
        const auto fail = [&](const std::string& why) {
            throw std::runtime_error(source + ":" + std::to_string(line) + ": " + why);
        };
        ScoredArticle a{r[ct], r[ci], parse_date(r[cd]), parse_real(r[cp]), parse_real(r[cn]), parse_real(r[cu]),
                        parse_real(r[cs])};
        if (a.ticker.empty()) fail("empty ticker");
        if (a.p_pos < 0 || a.p_neg < 0 || a.p_neutral < 0) fail("negative probability");
        if (std::abs(a.p_pos + a.p_neg + a.p_neutral - 1.0) > 1e-6) fail("probabilities do not sum to 1");
        if (!(a.score >= -1.0 && a.score <= 1.0)) fail("score outside [-1, 1]");
        if (std::abs(a.score - (a.p_pos - a.p_neg)) > 1e-6) fail("score is not p_pos - p_neg");
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<ScoredArticle> read_scored_articles_csv(const std::filesystem::path& path) {
    return parse_scored_articles_csv(read_text_file(path), path.string());
}

std::map<std::string, SentimentWeeks> weekly_sentiment(std::span<const ScoredArticle> articles) {
    std::map<std::pair<std::string, Date>, std::vector<double>> by;
    for (const auto& a : articles) by[{a.ticker, week_ending_friday(a.publish_date)}].push_back(a.score);
    std::map<std::string, SentimentWeeks> out;
    for (auto& [k, v] : by) out[k.first][k.second] = *median(std::move(v));
    return out;
}

std::string sentiment_csv(const std::map<std::string, SentimentWeeks>& weeks) {
    std::ostringstream os;
    os << "ticker,week_end,sentiment\n";
    CsvWriter w(os);
    for (const auto& [t, ws] : weeks) {
        for (const auto& [d, v] : ws) w.row({t, format_date(d), format_real(v)});
    }
    return os.str();
}

std::string feature_csv_header() {
    std::string h = "ticker,sector,week_end";
    for (auto n : kFeatureNames) {
        h += ',';
        h += n;
    }
    return h + ",target";
}

std::string features_csv(std::span<const WeeklyFeatureRow> rows) {
    std::ostringstream os;
    os << feature_csv_header() << '\n';
    CsvWriter w(os);
    std::vector<std::string> fields;
    for (const auto& r : rows) {
        fields.assign({r.ticker, r.sector, format_date(r.week_end)});
        for (const auto& v : r.x) fields.push_back(format_real(v));
        fields.push_back(format_real(r.target));
        w.row(fields);
    }
    return os.str();
}

std::vector<WeeklyFeatureRow> parse_features_csv(std::string_view text, std::string source) {
    const auto table = CsvTable::parse(text, std::move(source));
    const auto c_ticker = table.column("ticker");
    const auto c_sector = table.column("sector");
    const auto c_week = table.column("week_end");
    const auto c_target = table.column("target");
    std::array<std::size_t, kFeatureCount> cols{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) cols[k] = table.column(kFeatureNames[k]);
    std::vector<WeeklyFeatureRow> out;
    out.reserve(table.size());
    for (const auto& r : table.rows()) {
        WeeklyFeatureRow row;
        row.ticker = r[c_ticker];
        row.sector = r[c_sector];
        row.week_end = parse_date(r[c_week]);
        for (std::size_t k = 0; k < kFeatureCount; ++k) row.x[k] = parse_maybe_real(r[cols[k]]);
        row.target = parse_maybe_real(r[c_target]);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<WeeklyFeatureRow> read_features_csv(const std::filesystem::path& path) {
    return parse_features_csv(read_text_file(path), path.string());
}

}  // namespace stackcast::features
