#pragma once

#include <span>
#include <vector>

#include "stackcast/market_data/types.hpp"

namespace stackcast::features {

struct IndicatorWindows {
    static constexpr std::size_t cci = 20;
    static constexpr std::size_t macd_fast = 12;
    static constexpr std::size_t macd_slow = 26;
    static constexpr std::size_t macd_signal = 9;
    static constexpr std::size_t rsi = 14;
    static constexpr std::size_t kdj = 14;
    static constexpr std::size_t kdj_smooth = 3;
    static constexpr std::size_t wr = 14;
    static constexpr std::size_t atr = 14;
    static constexpr std::size_t cmf = 20;
};

// Longest warm-up: slow EMA plus signal EMA.
inline constexpr std::size_t kMinIndicatorBars = IndicatorWindows::macd_slow + IndicatorWindows::macd_signal;

struct IndicatorRow {
    Date date;
    MaybeReal cci;     // (TP - SMA20(TP)) / (0.015 * MD20(TP))
    MaybeReal macdh;   // (EMA12 - EMA26) - EMA9(MACD)
    MaybeReal rsi;     // Wilder, 14
    MaybeReal kdj_k;   // SMA3 of RSV14
    MaybeReal wr;      // Williams %R, 14
    MaybeReal atr_pct; // 100 * WilderATR14 / close
    MaybeReal cmf;     // Chaikin money flow, 20
};

// Rows before each indicator's warm-up are missing. Degenerate windows map to
// neutral values: CCI 0 on zero mean deviation, K 50 and WR -50 on a flat
// high/low range, a day's money-flow multiplier 0 when high == low, RSI 50 on no
// movement at all, CMF 0 on zero volume. Throws DataError below kMinIndicatorBars.
std::vector<IndicatorRow> compute_indicators(std::span<const market::AdjustedBar> bars);
std::vector<IndicatorRow> compute_indicators(const market::DailySeries& series);

}  // namespace stackcast::features
