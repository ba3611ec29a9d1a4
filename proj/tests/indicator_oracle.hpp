#pragma once

// Spreadsheet-style reference: every indicator is a column computed cell by
// cell from earlier cells, windows re-scanned from scratch on each row.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace oracle {

struct Bar {
    double o, h, l, c, v;
};

struct Row {
    std::optional<double> cci, macdh, rsi, k, wr, atr_pct, cmf;
};

inline std::vector<Row> indicators(const std::vector<Bar>& b) {
    const int n = static_cast<int>(b.size());
    std::vector<Row> out(n);

    // CCI column
    std::vector<double> tp(n);
    for (int i = 0; i < n; ++i) tp[i] = (b[i].h + b[i].l + b[i].c) / 3.0;
    for (int i = 19; i < n; ++i) {
        double s = 0;
        for (int k = i - 19; k <= i; ++k) s += tp[k];
        const double sma = s / 20.0;
        double md = 0;
        for (int k = i - 19; k <= i; ++k) md += std::fabs(tp[k] - sma);
        md /= 20.0;
        out[i].cci = (md <= 1e-12 * std::max(1.0, std::fabs(sma))) ? 0.0 : (tp[i] - sma) / (0.015 * md);
    }

    // MACD columns: EMA_t = EMA_{t-1} + a (x_t - EMA_{t-1}), EMA_0 = x_0
    std::vector<double> e12(n), e26(n), macd(n), sig(n);
    for (int i = 0; i < n; ++i) {
        e12[i] = i == 0 ? b[0].c : e12[i - 1] + (2.0 / 13.0) * (b[i].c - e12[i - 1]);
        e26[i] = i == 0 ? b[0].c : e26[i - 1] + (2.0 / 27.0) * (b[i].c - e26[i - 1]);
        macd[i] = e12[i] - e26[i];
        sig[i] = i == 0 ? macd[0] : sig[i - 1] + (2.0 / 10.0) * (macd[i] - sig[i - 1]);
        if (i >= 33) out[i].macdh = macd[i] - sig[i];
    }

    // RSI columns
    std::vector<double> gain(n, 0), loss(n, 0), ag(n, 0), al(n, 0);
    for (int i = 1; i < n; ++i) {
        const double d = b[i].c - b[i - 1].c;
        gain[i] = d > 0 ? d : 0;
        loss[i] = d < 0 ? -d : 0;
    }
    for (int i = 14; i < n; ++i) {
        if (i == 14) {
            double g = 0, l = 0;
            for (int k = 1; k <= 14; ++k) {
                g += gain[k];
                l += loss[k];
            }
            ag[i] = g / 14.0;
            al[i] = l / 14.0;
        } else {
            ag[i] = (ag[i - 1] * 13.0 + gain[i]) / 14.0;
            al[i] = (al[i - 1] * 13.0 + loss[i]) / 14.0;
        }
        if (al[i] == 0) {
            out[i].rsi = ag[i] == 0 ? 50.0 : 100.0;
        } else {
            out[i].rsi = 100.0 - 100.0 / (1.0 + ag[i] / al[i]);
        }
    }

    // RSV, K, WR columns
    std::vector<double> rsv(n, 0);
    for (int i = 13; i < n; ++i) {
        double hh = b[i - 13].h, ll = b[i - 13].l;
        for (int k = i - 13; k <= i; ++k) {
            hh = std::max(hh, b[k].h);
            ll = std::min(ll, b[k].l);
        }
        rsv[i] = hh == ll ? 50.0 : 100.0 * (b[i].c - ll) / (hh - ll);
        out[i].wr = hh == ll ? -50.0 : -100.0 * (hh - b[i].c) / (hh - ll);
        if (i >= 15) out[i].k = (rsv[i - 2] + rsv[i - 1] + rsv[i]) / 3.0;
    }

    // ATR columns
    std::vector<double> tr(n, 0), atr(n, 0);
    for (int i = 1; i < n; ++i) {
        tr[i] = std::max(b[i].h - b[i].l, std::max(std::fabs(b[i].h - b[i - 1].c), std::fabs(b[i].l - b[i - 1].c)));
    }
    for (int i = 14; i < n; ++i) {
        if (i == 14) {
            double s = 0;
            for (int k = 1; k <= 14; ++k) s += tr[k];
            atr[i] = s / 14.0;
        } else {
            atr[i] = (atr[i - 1] * 13.0 + tr[i]) / 14.0;
        }
        out[i].atr_pct = 100.0 * atr[i] / b[i].c;
    }

    // CMF column
    for (int i = 19; i < n; ++i) {
        double num = 0, den = 0;
        for (int k = i - 19; k <= i; ++k) {
            const double mfm = b[k].h == b[k].l ? 0.0 : ((b[k].c - b[k].l) - (b[k].h - b[k].c)) / (b[k].h - b[k].l);
            num += mfm * b[k].v;
            den += b[k].v;
        }
        out[i].cmf = den == 0 ? 0.0 : num / den;
    }
    return out;
}

// 40 trading days; adj_close == close so the adjusted and raw bars coincide.
inline std::vector<Bar> fixture40() {
    std::vector<Bar> b;
    for (int i = 0; i < 40; ++i) {
        const double c = 50.0 + 3.0 * std::sin(0.45 * i) + 0.15 * i;
        const double o = c - 0.6 * std::cos(0.8 * i);
        const double h = std::max(o, c) + 0.4 + 0.1 * (i % 4);
        const double l = std::min(o, c) - 0.3 - 0.05 * (i % 5);
        const double v = 10000.0 + 750.0 * (i % 7) - 40.0 * i;
        b.push_back({o, h, l, c, v});
    }
    return b;
}

}  // namespace oracle
