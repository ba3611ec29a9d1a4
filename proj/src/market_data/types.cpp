#include "stackcast/market_data/types.hpp"

#include <algorithm>

namespace stackcast::market {

AdjustedBar adjust(const DailyBar& bar) {
    const double k = bar.close > 0.0 ? bar.adj_close / bar.close : 1.0;
    return {bar.date, bar.open * k, bar.high * k, bar.low * k, bar.adj_close, bar.volume};
}

std::vector<AdjustedBar> adjust(const DailySeries& series) {
    std::vector<AdjustedBar> out;
    out.reserve(series.bars.size());
    for (const auto& b : series.bars) out.push_back(adjust(b));
    return out;
}

bool is_known_sector(std::string_view sector) {
    return std::find(kSectors.begin(), kSectors.end(), sector) != kSectors.end();
}

void validate(const DailySeries& series) {
    for (std::size_t i = 0; i < series.bars.size(); ++i) {
        const auto& b = series.bars[i];
        const std::string where = series.ticker + " " + format_date(b.date);
        if (i > 0 && !(series.bars[i - 1].date < b.date)) {
            throw DataError(where + ": dates not strictly increasing");
        }
        if (!(b.adj_close > 0.0) || !(b.close > 0.0)) throw DataError(where + ": non-positive price");
        if (b.low > std::min(b.open, b.close) || std::max(b.open, b.close) > b.high) {
            throw DataError(where + ": OHLC ordering violated");
        }
        if (b.volume < 0.0 || b.dividend < 0.0 || !(b.split > 0.0)) {
            throw DataError(where + ": negative volume/dividend or non-positive split");
        }
    }
}

}  // namespace stackcast::market
