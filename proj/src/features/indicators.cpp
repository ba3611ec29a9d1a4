#include "stackcast/features/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace stackcast::features {

namespace {

using W = IndicatorWindows;

class Ema {
public:
    explicit Ema(std::size_t period) : alpha_(2.0 / (double(period) + 1.0)) {}
    double push(double x) {
        value_ = seeded_ ? value_ + alpha_ * (x - value_) : x;
        seeded_ = true;
        return value_;
    }

private:
    double alpha_;
    double value_ = 0.0;
    bool seeded_ = false;
};

// Plain mean over the first `period` inputs, then a <- a + (x - a) / period.
class Wilder {
public:
    explicit Wilder(std::size_t period) : period_(period) {}
    std::optional<double> push(double x) {
        if (count_ < period_) {
            sum_ += x;
            if (++count_ < period_) return std::nullopt;
            value_ = sum_ / double(period_);
            return value_;
        }
        value_ += (x - value_) / double(period_);
        return value_;
    }

private:
    std::size_t period_;
    std::size_t count_ = 0;
    double sum_ = 0.0;
    double value_ = 0.0;
};

// Monotone deque extreme over a sliding window.
template <typename Better>
class RollingExtreme {
public:
    explicit RollingExtreme(std::size_t window) : window_(window) {}
    void push(std::size_t i, double x) {
        while (!q_.empty() && !Better{}(q_.back().second, x)) q_.pop_back();
        q_.emplace_back(i, x);
        while (q_.front().first + window_ <= i) q_.pop_front();
    }
    double value() const { return q_.front().second; }

private:
    std::size_t window_;
    std::deque<std::pair<std::size_t, double>> q_;
};

}  // namespace

std::vector<IndicatorRow> compute_indicators(const market::DailySeries& series) {
    return compute_indicators(market::adjust(series));
}

std::vector<IndicatorRow> compute_indicators(std::span<const market::AdjustedBar> bars) {
    const std::size_t n = bars.size();
    if (n < kMinIndicatorBars) {
        throw market::DataError("indicators need at least " + std::to_string(kMinIndicatorBars) +
                                " daily bars, got " + std::to_string(n));
    }
    std::vector<IndicatorRow> out(n);

    std::vector<double> tp(n), mfv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = bars[i];
        tp[i] = (b.high + b.low + b.close) / 3.0;
        const double range = b.high - b.low;
        const double mfm = range > 0.0 ? ((b.close - b.low) - (b.high - b.close)) / range : 0.0;
        mfv[i] = mfm * b.volume;
    }

    Ema fast(W::macd_fast), slow(W::macd_slow), signal(W::macd_signal);
    Wilder gain(W::rsi), loss(W::rsi), atr(W::atr);
    RollingExtreme<std::greater<>> hh(W::kdj);
    RollingExtreme<std::less<>> ll(W::kdj);
    std::deque<double> rsv_window;

    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = bars[i];
        IndicatorRow& row = out[i];
        row.date = b.date;

        // CCI: direct window sums keep flat windows exactly flat.
        if (i + 1 >= W::cci) {
            const std::size_t lo = i + 1 - W::cci;
            double sma = 0.0;
            for (std::size_t k = lo; k <= i; ++k) sma += tp[k];
            sma /= double(W::cci);
            double md = 0.0;
            for (std::size_t k = lo; k <= i; ++k) md += std::abs(tp[k] - sma);
            md /= double(W::cci);
            row.cci = md <= 1e-12 * std::max(1.0, std::abs(sma)) ? 0.0 : (tp[i] - sma) / (0.015 * md);
        }

        const double macd = fast.push(b.close) - slow.push(b.close);
        const double hist = macd - signal.push(macd);
        if (i + 2 >= W::macd_slow + W::macd_signal) row.macdh = hist;

        if (i >= 1) {
            const double d = b.close - bars[i - 1].close;
            const auto g = gain.push(std::max(d, 0.0));
            const auto l = loss.push(std::max(-d, 0.0));
            if (g && l) {
                if (*l == 0.0) {
                    row.rsi = *g == 0.0 ? 50.0 : 100.0;
                } else {
                    row.rsi = 100.0 - 100.0 / (1.0 + *g / *l);
                }
            }
            const double pc = bars[i - 1].close;
            const double tr = std::max({b.high - b.low, std::abs(b.high - pc), std::abs(b.low - pc)});
            if (const auto a = atr.push(tr)) row.atr_pct = 100.0 * *a / b.close;
        }

        hh.push(i, b.high);
        ll.push(i, b.low);
        if (i + 1 >= W::kdj) {
            const double h = hh.value(), l = ll.value();
            const double range = h - l;
            const double rsv = range > 0.0 ? 100.0 * (b.close - l) / range : 50.0;
            row.wr = range > 0.0 ? -100.0 * (h - b.close) / range : -50.0;
            rsv_window.push_back(rsv);
            if (rsv_window.size() > W::kdj_smooth) rsv_window.pop_front();
            if (rsv_window.size() == W::kdj_smooth) {
                row.kdj_k = (rsv_window[0] + rsv_window[1] + rsv_window[2]) / 3.0;
            }
        }

        if (i + 1 >= W::cmf) {
            // Window sums, not running ones: a constant suffix must give identical values.
            double s = 0.0, v = 0.0;
            for (std::size_t k = i + 1 - W::cmf; k <= i; ++k) {
                s += mfv[k];
                v += bars[k].volume;
            }
            row.cmf = v > 0.0 ? std::clamp(s / v, -1.0, 1.0) : 0.0;
        }
    }
    return out;
}

}  // namespace stackcast::features
