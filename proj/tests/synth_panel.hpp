#pragma once

#include <random>
#include <vector>

#include "stackcast/backtest/panel.hpp"
#include "stackcast/synth/synth.hpp"

namespace testutil {

inline stackcast::backtest::Panel panel_of(const std::vector<stackcast::synth::SynthStock>& stocks) {
    return stackcast::backtest::make_panel(stackcast::synth::feature_rows(stocks));
}

// Scrambles every raw input dated after t: daily bars, sentiment weeks and
// reports taking effect later. Bars keep their OHLC ordering.
inline std::vector<stackcast::synth::SynthStock> mutate_after(std::vector<stackcast::synth::SynthStock> stocks,
                                                              stackcast::Date t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> f(0.5, 2.0), s(-1.0, 1.0);
    for (auto& st : stocks) {
        for (auto& b : st.daily.bars) {
            if (b.date <= t) continue;
            const double k = f(rng);
            b.open *= k;
            b.high *= k;
            b.low *= k;
            b.close *= k;
            b.adj_close *= k;
            b.volume *= f(rng);
        }
        for (auto& [week, v] : st.sentiment) {
            if (week > t) v = s(rng);
        }
        for (auto& r : st.reports) {
            if (r.effective_date <= t) continue;
            if (r.eps_ttm) *r.eps_ttm *= f(rng);
            if (r.book_per_share) *r.book_per_share *= f(rng);
            if (r.revenue_per_share_ttm) *r.revenue_per_share_ttm *= f(rng);
        }
    }
    return stocks;
}

}  // namespace testutil
