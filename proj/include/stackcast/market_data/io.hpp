#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stackcast/market_data/reconcile.hpp"
#include "stackcast/market_data/types.hpp"

namespace stackcast::market {

// Header: date,open,high,low,close,adj_close,volume,dividend,split
inline constexpr std::string_view kDailyHeader = "date,open,high,low,close,adj_close,volume,dividend,split";

RawSeries read_daily_csv(const std::filesystem::path& path, std::string ticker);
RawSeries parse_daily_csv(std::string_view text, std::string ticker);
std::string daily_csv(const DailySeries& series);
std::string daily_csv(const RawSeries& series);

// ticker,sector
std::map<std::string, std::string> read_sector_map(const std::filesystem::path& path);

// ticker,week_end,avg_log_adj_close,return
std::string weekly_csv(const std::vector<WeeklySeries>& series);
std::vector<WeeklySeries> read_weekly_csv(const std::filesystem::path& path);

}  // namespace stackcast::market
