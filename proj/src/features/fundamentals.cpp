#include "stackcast/features/fundamentals.hpp"

#include <algorithm>

namespace stackcast::features {

namespace {

MaybeReal ratio(double price, const MaybeReal& denom) {
    if (!denom || *denom <= 0.0) return std::nullopt;
    return price / *denom;
}

}  // namespace

std::vector<FundamentalRow> compute_fundamentals(const market::DailySeries& series,
                                                 std::span<const QuarterlyReport> reports) {
    std::vector<QuarterlyReport> sorted(reports.begin(), reports.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.effective_date < b.effective_date; });

    std::vector<FundamentalRow> out;
    out.reserve(series.bars.size());
    std::size_t next = 0;
    const QuarterlyReport* current = nullptr;
    for (const auto& bar : series.bars) {
        while (next < sorted.size() && sorted[next].effective_date <= bar.date) current = &sorted[next++];
        FundamentalRow row{bar.date, {}, {}, {}};
        if (current) {
            row.pe = ratio(bar.close, current->eps_ttm);
            row.pb = ratio(bar.close, current->book_per_share);
            row.ps = ratio(bar.close, current->revenue_per_share_ttm);
        }
        out.push_back(row);
    }
    return out;
}

std::map<std::string, std::vector<QuarterlyReport>> parse_reports_csv(std::string_view text, std::string source) {
    const auto table = CsvTable::parse(text, std::move(source));
    const auto c_ticker = table.column("ticker");
    const auto c_date = table.column("effective_date");
    const auto c_eps = table.column("eps_ttm");
    const auto c_book = table.column("book_per_share");
    const auto c_rev = table.column("revenue_per_share_ttm");
    std::map<std::string, std::vector<QuarterlyReport>> out;
    for (const auto& r : table.rows()) {
        out[r[c_ticker]].push_back(QuarterlyReport{parse_date(r[c_date]), parse_maybe_real(r[c_eps]),
                                                   parse_maybe_real(r[c_book]), parse_maybe_real(r[c_rev])});
    }
    return out;
}

std::map<std::string, std::vector<QuarterlyReport>> read_reports_csv(const std::filesystem::path& path) {
    return parse_reports_csv(read_text_file(path), path.string());
}

}  // namespace stackcast::features
