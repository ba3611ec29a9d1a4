#pragma once

#include <optional>
#include <string>

#include "stackcast/market_data/reconcile.hpp"
#include "stackcast/market_data/repair.hpp"
#include "stackcast/market_data/types.hpp"

namespace stackcast::market {

struct IngestOptions {
    ReconcileOptions reconcile;
    double min_years = 5.0;
    std::size_t max_missing_run = kMaxMissingRun;
};

struct IngestResult {
    std::string ticker;
    bool kept = false;
    std::string reason;  // why the stock was rejected
    std::optional<ReconciliationReport> report;
    DailySeries daily;
    WeeklySeries weekly;
};

// The cleaning chain for one stock. With an alternative source, complete base
// rows are compared first and rows disagreeing by more than the drop threshold
// are removed; the remaining gaps on the union calendar are then filled by the
// half-gap rule, the series is aggregated to weeks and the history filter is
// applied. Rejections come back with a reason instead of throwing.
IngestResult ingest_stock(const RawSeries& base, const RawSeries* alt, const std::string& sector,
                          const IngestOptions& options = {});

}  // namespace stackcast::market
