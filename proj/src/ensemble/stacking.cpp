#include "stackcast/ensemble/stacking.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "stackcast/common/csv.hpp"
#include "stackcast/common/log.hpp"
#include "stackcast/common/stats.hpp"
#include "stackcast/ensemble/nnls.hpp"

namespace stackcast::ensemble {

namespace {

using Key = std::pair<std::string, Date>;  // ticker, week

struct Table {
    std::map<Key, std::vector<std::optional<double>>> base;  // per model column
    std::map<Key, double> realized;
};

Table tabulate(const std::vector<models::Prediction>& preds, const std::vector<backtest::Realized>& realized,
               const std::vector<std::string>& ids) {
    std::map<std::string, std::size_t> col;
    for (std::size_t k = 0; k < ids.size(); ++k) col[ids[k]] = k;
    Table t;
    for (const auto& p : preds) {
        const auto it = col.find(p.model_id);
        if (it == col.end()) continue;
        auto& row = t.base[{p.ticker, p.week_end}];
        row.resize(ids.size());
        row[it->second] = p.value;
    }
    for (const auto& r : realized) t.realized[{r.ticker, r.week_end}] = r.value;
    return t;
}

EnsembleFit fit_window(const Table& t, const std::vector<std::string>& ids, const std::string& pool, Date lo, Date hi,
                       bool pooled) {
    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    for (const auto& [key, vals] : t.base) {
        if (key.second <= lo || key.second > hi) continue;
        if (!pooled && key.first != pool) continue;
        const auto r = t.realized.find(key);
        if (r == t.realized.end()) continue;
        if (std::any_of(vals.begin(), vals.end(), [](const auto& v) { return !v; })) continue;
        std::vector<double> row;
        for (const auto& v : vals) row.push_back(*v);
        rows.push_back(std::move(row));
        ys.push_back(r->second);
    }
    EnsembleFit f;
    f.pool = pool;
    f.model_ids = ids;
    f.window_start = lo;
    f.window_end = hi;
    f.rows = rows.size();
    if (rows.empty()) return f;
    Eigen::MatrixXd P(Eigen::Index(rows.size()), Eigen::Index(ids.size()));
    Eigen::VectorXd y(Eigen::Index(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < ids.size(); ++k) P(Eigen::Index(i), Eigen::Index(k)) = rows[i][k];
        y(Eigen::Index(i)) = ys[i];
    }
    f.weights = fit_nnls(P, y);
    f.residual_norm = (y - P * f.weights).norm();
    for (Eigen::Index k = 0; k < P.cols(); ++k) f.one_hot_residual_norms.push_back((y - P.col(k)).norm());
    return f;
}

std::vector<Date> ensemble_fit_dates(const backtest::DateRange& range) {
    return backtest::build_schedule(range, models::Update::yearly).update_boundaries;
}

// Fits per pool at each boundary, then predicts the following segment.
void stack(const Table& t, const std::vector<std::string>& ids, const std::vector<std::string>& pools, bool pooled,
           const std::vector<Date>& dates, Date range_end, int window_years, const std::string& model_id,
           std::vector<models::Prediction>& preds, std::vector<backtest::Skip>& skips, std::vector<EnsembleFit>& fits) {
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const Date hi = dates[i];
        const Date lo = backtest::years_before(hi, window_years);
        const Date next = i + 1 < dates.size() ? dates[i + 1] : range_end;
        std::map<std::string, std::size_t> fit_of;
        for (const auto& pool : pools) {
            auto f = fit_window(t, ids, pool, lo, hi, pooled);
            if (f.rows == 0) {
                log::warn(model_id + " " + pool + " " + format_date(hi) + ": no complete training pairs");
                continue;
            }
            fit_of[pool] = fits.size();
            fits.push_back(std::move(f));
        }
        for (const auto& [key, vals] : t.base) {
            if (key.second <= hi || key.second > next) continue;
            const auto it = fit_of.find(pooled ? pools.front() : key.first);
            if (it == fit_of.end()) {
                skips.push_back({model_id, key.first, key.second, "no ensemble fit for this window"});
                continue;
            }
            std::string missing;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                if (!vals[k]) missing += (missing.empty() ? "" : " ") + ids[k];
            }
            if (!missing.empty()) {
                skips.push_back({model_id, key.first, key.second, "missing base prediction: " + missing});
                continue;
            }
            std::vector<double> b;
            for (const auto& v : vals) b.push_back(*v);
            preds.push_back({key.first, key.second, model_id, dot(fits[it->second], b)});
        }
    }
}

}  // namespace

double dot(const EnsembleFit& fit, const std::vector<double>& base) {
    if (base.size() != std::size_t(fit.weights.size())) throw std::invalid_argument("ensemble: base prediction count");
    double s = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) s += fit.weights(Eigen::Index(k)) * base[k];
    return s;
}

std::vector<models::Prediction> index_features(const std::vector<models::Prediction>& preds,
                                               const std::vector<std::string>& model_ids) {
    std::map<std::pair<std::string, Date>, std::vector<double>> by;
    for (const auto& p : preds) {
        if (std::find(model_ids.begin(), model_ids.end(), p.model_id) == model_ids.end()) continue;
        by[{p.model_id, p.week_end}].push_back(p.value);
    }
    std::vector<models::Prediction> out;
    for (auto& [key, vals] : by) {
        out.push_back({std::string(kIndexTicker), key.second, "median_" + key.first, *median(std::move(vals))});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.model_id, a.week_end) < std::tie(b.model_id, b.week_end);
    });
    return out;
}

std::vector<backtest::Realized> index_realized(const std::vector<backtest::Realized>& realized) {
    std::map<Date, std::pair<double, std::size_t>> by;
    for (const auto& r : realized) {
        auto& a = by[r.week_end];
        a.first += r.value;
        ++a.second;
    }
    std::vector<backtest::Realized> out;
    for (const auto& [d, a] : by) out.push_back({std::string(kIndexTicker), d, a.first / double(a.second)});
    return out;
}

EnsembleResult run_ensemble(const std::vector<models::Prediction>& base, const std::vector<backtest::Realized>& realized,
                            const backtest::DateRange& range, const EnsembleOptions& o,
                            const std::vector<backtest::Realized>& index_returns) {
    if (o.base_ids.empty()) throw std::invalid_argument("ensemble: base_ids is empty");
    if (o.window_years < 1) throw std::invalid_argument("ensemble: window_years must be positive");
    const auto dates = ensemble_fit_dates(range);
    EnsembleResult res;

    const Table t = tabulate(base, realized, o.base_ids);
    std::vector<std::string> pools;
    if (o.per_stock) {
        for (const auto& [key, v] : t.base) {
            if (pools.empty() || pools.back() != key.first) pools.push_back(key.first);
        }
    } else {
        pools.push_back("all");
    }
    stack(t, o.base_ids, pools, !o.per_stock, dates, range.end, o.window_years, o.model_id, res.predictions, res.skips,
          res.fits);

    if (o.index) {
        const auto med = index_features(base, o.index_ids);
        res.index_realized = index_returns.empty() ? index_realized(realized) : index_returns;
        for (auto& r : res.index_realized) r.ticker = std::string(kIndexTicker);
        std::vector<std::string> ids;
        for (const auto& id : o.index_ids) ids.push_back("median_" + id);
        const Table ti = tabulate(med, res.index_realized, ids);
        stack(ti, ids, {std::string(kIndexTicker)}, true, dates, range.end, o.index_window_years, o.index_model_id,
              res.predictions, res.skips, res.index_fits);
        res.predictions.insert(res.predictions.end(), med.begin(), med.end());
    }
    std::sort(res.predictions.begin(), res.predictions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.model_id, a.ticker, a.week_end) < std::tie(b.model_id, b.ticker, b.week_end);
    });
    std::sort(res.skips.begin(), res.skips.end(), [](const auto& a, const auto& b) {
        return std::tie(a.model_id, a.ticker, a.week_end) < std::tie(b.model_id, b.ticker, b.week_end);
    });
    return res;
}

std::string weights_csv(const std::vector<EnsembleFit>& fits, bool with_pool) {
    std::ostringstream os;
    os << (with_pool ? "pool," : "") << "window_start,window_end,model_id,weight\n";
    CsvWriter w(os);
    for (const auto& f : fits) {
        for (std::size_t k = 0; k < f.model_ids.size(); ++k) {
            std::vector<std::string> row;
            if (with_pool) row.push_back(f.pool);
            row.insert(row.end(), {format_date(f.window_start), format_date(f.window_end), f.model_ids[k],
                                   format_real(f.weights(Eigen::Index(k)))});
            w.row(row);
        }
    }
    return os.str();
}

}  // namespace stackcast::ensemble
