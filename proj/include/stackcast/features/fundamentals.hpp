#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stackcast/market_data/types.hpp"

namespace stackcast::features {

struct QuarterlyReport {
    Date effective_date;
    MaybeReal eps_ttm;
    MaybeReal book_per_share;
    MaybeReal revenue_per_share_ttm;
};

struct FundamentalRow {
    Date date;
    MaybeReal pe, pb, ps;
};

// As-of join on raw close: each day takes the latest report effective on or
// before it. Non-positive denominators leave that ratio missing.
std::vector<FundamentalRow> compute_fundamentals(const market::DailySeries& series,
                                                 std::span<const QuarterlyReport> reports);

// ticker,effective_date,eps_ttm,book_per_share,revenue_per_share_ttm
std::map<std::string, std::vector<QuarterlyReport>> read_reports_csv(const std::filesystem::path& path);
std::map<std::string, std::vector<QuarterlyReport>> parse_reports_csv(std::string_view text,
                                                                      std::string source = "<memory>");

}  // namespace stackcast::features
