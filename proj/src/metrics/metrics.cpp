#include "stackcast/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "stackcast/common/csv.hpp"
#include "stackcast/common/log.hpp"

namespace stackcast::metrics {

Metrics compute_metrics(std::span<const double> R, std::span<const double> P) {
    if (R.size() != P.size()) {
        throw std::invalid_argument("compute_metrics: " + std::to_string(R.size()) + " realized vs " +
                                    std::to_string(P.size()) + " predicted values");
    }
    if (R.empty()) throw std::invalid_argument("compute_metrics: no observations");
    std::size_t hit = 0, up = 0, up_hit = 0, down = 0, down_hit = 0;
    double se = 0.0, ae = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const bool ru = R[i] >= 0.0, pu = P[i] >= 0.0;
        hit += ru == pu;
        if (ru) {
            ++up;
            up_hit += pu;
        } else {
            ++down;
            down_hit += !pu;
        }
        const double e = R[i] - P[i];
        se += e * e;
        ae += std::fabs(e);
    }
    Metrics m;
    m.n = R.size();
    const double n = double(m.n);
    m.da = double(hit) / n;
    m.uda = up == 0 ? 1.0 : double(up_hit) / double(up);
    m.dda = down == 0 ? 1.0 : double(down_hit) / double(down);
    m.mse = se / n;
    m.rmse = std::sqrt(m.mse);
    m.mae = ae / n;
    return m;
}

std::vector<Joined> join(const std::vector<models::Prediction>& preds, const std::vector<backtest::Realized>& realized,
                         std::optional<Date> from, std::optional<Date> to) {
    std::map<std::pair<std::string, Date>, double> r;
    for (const auto& x : realized) r[{x.ticker, x.week_end}] = x.value;
    std::vector<Joined> out;
    for (const auto& p : preds) {
        if ((from && p.week_end < *from) || (to && p.week_end > *to)) continue;
        const auto it = r.find({p.ticker, p.week_end});
        if (it == r.end()) continue;
        out.push_back({p.model_id, p.ticker, p.week_end, it->second, p.value});
    }
    return out;
}

std::vector<models::Prediction> always_up(const std::vector<backtest::Realized>& realized, const std::string& model_id) {
    std::vector<models::Prediction> out;
    for (const auto& r : realized) out.push_back({r.ticker, r.week_end, model_id, 0.0});
    return out;
}

std::vector<MetricsRecord> aggregate(const std::vector<Joined>& rows, std::string_view index_ticker) {
    struct Acc {
        std::vector<double> r, p;
        Date last{};
        void add(const Joined& j) {
            r.push_back(j.realized);
            p.push_back(j.predicted);
            last = std::max(last, j.week_end);
        }
    };
    // key: model, scope, ticker, period
    std::map<std::tuple<std::string, std::string, std::string, std::string>, Acc> groups;
    for (const auto& j : rows) {
        const std::string year = std::to_string(year_of(j.week_end));
        if (j.ticker == index_ticker) {
            groups[{j.model_id, "index", "", year}].add(j);
            groups[{j.model_id, "index", "", "full"}].add(j);
            continue;
        }
        groups[{j.model_id, "stock", j.ticker, year}].add(j);
        groups[{j.model_id, "stock", j.ticker, "full"}].add(j);
        groups[{j.model_id, "all_stocks", "", year}].add(j);
        groups[{j.model_id, "all_stocks", "", "full"}].add(j);
    }
    std::vector<MetricsRecord> out;
    for (const auto& [k, a] : groups) {
        if (a.r.empty()) {
            log::info("metrics: empty group omitted");
            continue;
        }
        out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), a.last, compute_metrics(a.r, a.p)});
    }
    // scope, period, ticker order within each model
    auto scope_rank = [](const std::string& s) { return s == "all_stocks" ? 0 : s == "index" ? 1 : 2; };
    std::stable_sort(out.begin(), out.end(), [&](const MetricsRecord& a, const MetricsRecord& b) {
        return std::make_tuple(a.model_id, scope_rank(a.scope), a.period, a.ticker) <
               std::make_tuple(b.model_id, scope_rank(b.scope), b.period, b.ticker);
    });
    return out;
}

std::string metrics_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream os;
    os << "model_id,scope,ticker,period,last_week,n,da,uda,dda,mae,mse,rmse\n";
    CsvWriter w(os);
    for (const auto& r : records) {
        w.row({r.model_id, r.scope, r.ticker, r.period, format_date(r.last_week), std::to_string(r.m.n),
               format_real(r.m.da), format_real(r.m.uda), format_real(r.m.dda), format_real(r.m.mae),
               format_real(r.m.mse), format_real(r.m.rmse)});
    }
    return os.str();
}

ThresholdSummary threshold_report(std::span<const Joined> rows, double theta_up, double theta_down) {
    ThresholdSummary s;
    s.n = rows.size();
    s.theta_up = theta_up;
    s.theta_down = theta_down;
    std::size_t nu = 0, nu_up = 0, nd = 0, nd_hit = 0;
    double su = 0.0, sd = 0.0;
    for (const auto& j : rows) {
        if (j.predicted >= theta_up) {
            ++nu;
            nu_up += j.realized >= 0.0;
            su += j.realized;
        }
        if (j.realized <= theta_down) {
            ++nd;
            nd_hit += (j.realized >= 0.0) == (j.predicted >= 0.0);
            sd += j.predicted;
        }
    }
    if (s.n == 0) return s;
    s.up_frequency = double(nu) / double(s.n);
    s.down_frequency = double(nd) / double(s.n);
    if (nu > 0) {
        s.up_realized_rate = double(nu_up) / double(nu);
        s.up_mean_realized = su / double(nu);
    }
    if (nd > 0) {
        s.down_accuracy = double(nd_hit) / double(nd);
        s.down_mean_predicted = sd / double(nd);
    }
    return s;
}

SlopeSummary slope_diagnostics(std::span<const features::WeeklyFeatureRow> rows, features::Feature x, SlopeGroup group) {
    std::map<std::string, std::vector<std::pair<double, double>>> by;
    for (const auto& r : rows) {
        const auto& v = r[x];
        if (!v || !r.target) continue;
        std::string g = group == SlopeGroup::year      ? std::to_string(year_of(r.week_end))
                        : group == SlopeGroup::company ? r.ticker
                                                       : r.sector;
        by[g].emplace_back(*v, *r.target);
    }
    SlopeSummary out;
    for (const auto& [g, pts] : by) {
        if (pts.size() < 3) {
            out.skipped.push_back(g);
            log::info("slope: group " + g + " has fewer than 3 points");
            continue;
        }
        double mx = 0.0, my = 0.0;
        for (const auto& [a, b] : pts) {
            mx += a;
            my += b;
        }
        mx /= double(pts.size());
        my /= double(pts.size());
        double sxx = 0.0, sxy = 0.0;
        for (const auto& [a, b] : pts) {
            sxx += (a - mx) * (a - mx);
            sxy += (a - mx) * (b - my);
        }
        if (!(sxx > 1e-300) || sxx <= 1e-14 * std::max(1.0, mx * mx) * double(pts.size())) {
            out.skipped.push_back(g);
            log::info("slope: group " + g + " has zero variance in x");
            continue;
        }
        Slope s{g, sxy / sxx, 0.0, pts.size()};
        s.intercept = my - s.slope * mx;
        if (s.slope > 0) ++out.positive;
        if (s.slope < 0) ++out.negative;
        out.slopes.push_back(s);
    }
    return out;
}

}  // namespace stackcast::metrics
