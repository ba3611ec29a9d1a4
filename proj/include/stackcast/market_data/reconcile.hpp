#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "stackcast/market_data/types.hpp"

namespace stackcast::market {

struct ReconcileOptions {
    double drop_threshold = 0.02;         // relative adj_close disagreement that drops a row
    double agreement_tolerance = 0.01;    // "within 1%" tallies
    double max_violation_fraction = 0.05; // whole-stock rejection above this share of dropped rows
};

inline constexpr std::array<std::string_view, 6> kPriceFields = {"open", "high", "low",
                                                                 "close", "adj_close", "volume"};

struct FieldAgreement {
    std::string field;
    std::size_t compared = 0;
    std::size_t within_tolerance = 0;
    double within_fraction = 1.0;
    double q99_error = 0.0;
};

// Dividend or split events of the base source checked against the alternative.
struct EventAgreement {
    std::size_t base_events = 0;
    std::size_t dates_matched = 0;
    std::size_t exact = 0;
    std::size_t within_tolerance = 0;

    double dates_matched_fraction() const;
    double exact_fraction() const;   // conditional on matched dates
    double within_fraction() const;  // conditional on matched dates
};

struct ReconciliationReport {
    std::string ticker;
    std::size_t base_rows = 0;
    std::size_t alt_rows = 0;
    std::size_t matched_rows = 0;
    std::size_t rows_dropped = 0;
    double violation_fraction = 0.0;
    bool stock_rejected = false;
    std::vector<FieldAgreement> fields;
    EventAgreement dividends;
    EventAgreement splits;

    // key=value lines, one per statistic.
    std::string to_text() const;
};

// Keeps the base source; drops rows whose adj_close differs from the date-matched
// alternative by more than drop_threshold (relative to the alternative). Dates
// missing from the alternative are kept untouched. Dividend/split mismatches are
// only reported. Throws DataError("no common dates") on empty overlap.
std::pair<DailySeries, ReconciliationReport> reconcile(const DailySeries& base, const RawSeries& alt,
                                                       const ReconcileOptions& options = {});

std::pair<DailySeries, ReconciliationReport> reconcile(const DailySeries& base, const DailySeries& alt,
                                                       const ReconcileOptions& options = {});

RawSeries to_raw(const DailySeries& series);

// Cross-stock summary: pooled within-tolerance share per field and the share of
// stocks whose 99% quantile error is below `q99_limit`.
struct ReconciliationSummary {
    std::vector<FieldAgreement> pooled;
    std::vector<double> stocks_q99_below_limit;
    std::size_t stocks = 0;
    std::size_t stocks_rejected = 0;
    std::string to_text() const;
};

ReconciliationSummary summarize(const std::vector<ReconciliationReport>& reports, double q99_limit = 0.05);

}  // namespace stackcast::market
