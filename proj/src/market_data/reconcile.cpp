#include "stackcast/market_data/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace stackcast::market {

namespace {

double frac(std::size_t num, std::size_t den) { return den == 0 ? 1.0 : double(num) / double(den); }

double relative_error(double base, double alt) {
    if (alt == 0.0) return base == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(base - alt) / std::abs(alt);
}

// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = q * double(v.size() - 1);
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double w = pos - double(lo);
    if (std::isinf(v[hi]) || w == 0.0) return w == 0.0 ? v[lo] : v[hi];
    return v[lo] + w * (v[hi] - v[lo]);
}

void tally_event(EventAgreement& ev, double base_amount, const MaybeReal& alt_amount, double tol,
                 bool is_event_alt) {
    ++ev.base_events;
    if (!alt_amount || !is_event_alt) return;
    ++ev.dates_matched;
    if (*alt_amount == base_amount) ++ev.exact;
    if (relative_error(base_amount, *alt_amount) <= tol) ++ev.within_tolerance;
}

}  // namespace

double EventAgreement::dates_matched_fraction() const { return frac(dates_matched, base_events); }
double EventAgreement::exact_fraction() const { return frac(exact, dates_matched); }
double EventAgreement::within_fraction() const { return frac(within_tolerance, dates_matched); }

RawSeries to_raw(const DailySeries& series) {
    RawSeries r{series.ticker, {}};
    r.rows.reserve(series.bars.size());
    for (const auto& b : series.bars) {
        r.rows.push_back({b.date, b.open, b.high, b.low, b.close, b.adj_close, b.volume, b.dividend, b.split});
    }
    return r;
}

std::pair<DailySeries, ReconciliationReport> reconcile(const DailySeries& base, const DailySeries& alt,
                                                       const ReconcileOptions& options) {
    return reconcile(base, to_raw(alt), options);
}

std::pair<DailySeries, ReconciliationReport> reconcile(const DailySeries& base, const RawSeries& alt,
                                                       const ReconcileOptions& options) {
    std::map<Date, const RawBar*> alt_by_date;
    for (const auto& r : alt.rows) alt_by_date.emplace(r.date, &r);

    ReconciliationReport rep;
    rep.ticker = base.ticker;
    rep.base_rows = base.bars.size();
    rep.alt_rows = alt.rows.size();

    std::array<std::vector<double>, kPriceFields.size()> errors;
    DailySeries kept{base.ticker, base.sector, {}};
    kept.bars.reserve(base.bars.size());

    for (const auto& b : base.bars) {
        auto it = alt_by_date.find(b.date);
        if (it == alt_by_date.end()) {
            kept.bars.push_back(b);
            continue;
        }
        ++rep.matched_rows;
        const RawBar& a = *it->second;
        const std::array<double, 6> bv{b.open, b.high, b.low, b.close, b.adj_close, b.volume};
        const std::array<MaybeReal, 6> av{a.open, a.high, a.low, a.close, a.adj_close, a.volume};
        for (std::size_t k = 0; k < bv.size(); ++k) {
            if (av[k]) errors[k].push_back(relative_error(bv[k], *av[k]));
        }

        if (b.dividend > 0.0) {
            tally_event(rep.dividends, b.dividend, a.dividend, options.agreement_tolerance,
                        a.dividend && *a.dividend > 0.0);
        }
        if (b.split != 1.0) {
            tally_event(rep.splits, b.split, a.split, options.agreement_tolerance, a.split && *a.split != 1.0);
        }

        if (a.adj_close && relative_error(b.adj_close, *a.adj_close) > options.drop_threshold) {
            ++rep.rows_dropped;
            continue;
        }
        kept.bars.push_back(b);
    }

    if (rep.matched_rows == 0) throw DataError(base.ticker + ": no common dates");

    for (std::size_t k = 0; k < kPriceFields.size(); ++k) {
        FieldAgreement f;
        f.field = std::string(kPriceFields[k]);
        f.compared = errors[k].size();
        f.within_tolerance = std::size_t(std::count_if(errors[k].begin(), errors[k].end(), [&](double e) {
            return e <= options.agreement_tolerance;
        }));
        f.within_fraction = frac(f.within_tolerance, f.compared);
        f.q99_error = quantile(errors[k], 0.99);
        rep.fields.push_back(std::move(f));
    }
    rep.violation_fraction = frac(rep.rows_dropped, rep.matched_rows);
    if (rep.matched_rows == 0) rep.violation_fraction = 0.0;
    rep.stock_rejected = rep.violation_fraction > options.max_violation_fraction;
    return {std::move(kept), std::move(rep)};
}

std::string ReconciliationReport::to_text() const {
    std::ostringstream out;
    out << "ticker=" << ticker << '\n'
        << "base_rows=" << base_rows << '\n'
        << "alt_rows=" << alt_rows << '\n'
        << "matched_rows=" << matched_rows << '\n'
        << "rows_dropped=" << rows_dropped << '\n'
        << "violation_fraction=" << format_real(violation_fraction) << '\n'
        << "stock_rejected=" << (stock_rejected ? "true" : "false") << '\n';
    for (const auto& f : fields) {
        out << f.field << ".compared=" << f.compared << '\n'
            << f.field << ".within_1pct=" << format_real(f.within_fraction) << '\n'
            << f.field << ".q99_error=" << format_real(f.q99_error) << '\n';
    }
    auto ev = [&](std::string_view name, const EventAgreement& e) {
        out << name << ".base_events=" << e.base_events << '\n'
            << name << ".dates_matched=" << format_real(e.dates_matched_fraction()) << '\n'
            << name << ".exact=" << format_real(e.exact_fraction()) << '\n'
            << name << ".within_1pct=" << format_real(e.within_fraction()) << '\n';
    };
    ev("dividend", dividends);
    ev("split", splits);
    return out.str();
}

ReconciliationSummary summarize(const std::vector<ReconciliationReport>& reports, double q99_limit) {
    ReconciliationSummary s;
    s.stocks = reports.size();
    s.pooled.resize(kPriceFields.size());
    s.stocks_q99_below_limit.assign(kPriceFields.size(), 0.0);
    std::vector<std::size_t> below(kPriceFields.size(), 0);
    for (std::size_t k = 0; k < kPriceFields.size(); ++k) s.pooled[k].field = std::string(kPriceFields[k]);
    for (const auto& r : reports) {
        if (r.stock_rejected) ++s.stocks_rejected;
        for (std::size_t k = 0; k < r.fields.size() && k < kPriceFields.size(); ++k) {
            s.pooled[k].compared += r.fields[k].compared;
            s.pooled[k].within_tolerance += r.fields[k].within_tolerance;
            if (r.fields[k].q99_error < q99_limit) ++below[k];
        }
    }
    for (std::size_t k = 0; k < kPriceFields.size(); ++k) {
        s.pooled[k].within_fraction = frac(s.pooled[k].within_tolerance, s.pooled[k].compared);
        s.stocks_q99_below_limit[k] = frac(below[k], s.stocks);
    }
    return s;
}

std::string ReconciliationSummary::to_text() const {
    std::ostringstream out;
    out << "stocks=" << stocks << '\n' << "stocks_rejected=" << stocks_rejected << '\n';
    for (std::size_t k = 0; k < pooled.size(); ++k) {
        out << pooled[k].field << ".within_1pct=" << format_real(pooled[k].within_fraction) << '\n'
            << pooled[k].field << ".stocks_q99_below_5pct=" << format_real(stocks_q99_below_limit[k]) << '\n';
    }
    return out.str();
}

}  // namespace stackcast::market
