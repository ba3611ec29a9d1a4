#include "stackcast/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stackcast/backtest/walk_forward.hpp"
#include "stackcast/cli/config.hpp"
#include "stackcast/common/csv.hpp"
#include "stackcast/common/log.hpp"
#include "stackcast/common/parallel.hpp"
#include "stackcast/ensemble/stacking.hpp"
#include "stackcast/features/pipeline.hpp"
#include "stackcast/market_data/ingest.hpp"
#include "stackcast/market_data/io.hpp"
#include "stackcast/metrics/metrics.hpp"
#include "stackcast/synth/synth.hpp"
#include "stackcast/text_linking/linking.hpp"
#include "stackcast/text_linking/normalize.hpp"

namespace stackcast::cli {

namespace fs = std::filesystem;

namespace {

// Failures the user can fix: a missing input, an earlier step not run.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config;
    std::string run_dir;
    std::optional<std::uint64_t> seed;
    std::string start, end;
    std::optional<unsigned> workers;
    std::optional<std::size_t> rf_trees, max_epochs, patience, finetune_epochs;
    std::vector<std::string> only;
    bool verbose = false;
};

const fs::path& need_path(const fs::path& p, const std::string& field) {
    if (p.empty()) throw ConfigError(field + ": missing (needed by this command)");
    return p;
}

fs::path need_file(const fs::path& run_dir, const std::string& name, const std::string& producer) {
    const auto p = run_dir / name;
    if (!fs::exists(p)) {
        throw UsageError("missing " + p.string() + " (run `stackcast " + producer + "` first)");
    }
    return p;
}

RunConfig load(const Overrides& o) {
    if (o.config.empty()) throw ConfigError("--config: missing");
    auto c = load_config(o.config);
    if (!o.run_dir.empty()) c.run_dir = resolve_run_dir(o.run_dir, fs::current_path());
    if (o.seed) {
        // specs that took the config seed follow the override
        for (auto& s : c.specs) {
            if (s.seed == c.seed) s.seed = *o.seed;
        }
        c.seed = *o.seed;
    }
    if (!o.start.empty() || !o.end.empty()) {
        backtest::DateRange r = c.range.value_or(backtest::DateRange{});
        try {
            if (!o.start.empty()) r.start = parse_date(o.start);
            if (!o.end.empty()) r.end = parse_date(o.end);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--start/--end: ") + e.what());
        }
        if (r.end <= r.start) throw ConfigError("--end: must be after the range start");
        c.range = r;
    }
    if (o.workers) c.workers = *o.workers;
    if (o.rf_trees) c.budget.rf_trees = *o.rf_trees;
    if (o.max_epochs) c.budget.max_epochs = *o.max_epochs;
    if (o.patience) c.budget.patience = *o.patience;
    if (o.finetune_epochs) c.budget.finetune_epochs = *o.finetune_epochs;
    if (!o.only.empty()) {
        std::vector<models::ModelSpec> kept;
        for (const auto& id : o.only) {
            const auto it = std::find_if(c.specs.begin(), c.specs.end(), [&](const auto& s) { return s.id == id; });
            if (it == c.specs.end()) throw ConfigError("--only: no model with id '" + id + "'");
            kept.push_back(*it);
        }
        c.specs = std::move(kept);
    }
    return c;
}

// A fresh log per command inside the run directory.
void open_log(const RunConfig& c, const std::string& command, bool verbose) {
    fs::create_directories(c.run_dir / "logs");
    const auto path = c.run_dir / "logs" / (command + ".log");
    write_text_file(path, "");
    log::set_file(path);
    log::set_level(verbose ? log::Level::debug : log::Level::info);
}

unsigned workers_of(const RunConfig& c) { return c.workers == 0 ? default_workers() : c.workers; }

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// ---- ingest

void cmd_ingest(const RunConfig& c) {
    const auto& prices = need_path(c.paths.prices, "paths.prices");
    const auto sectors = market::read_sector_map(need_path(c.paths.sectors, "paths.sectors"));

    std::vector<std::string> tickers;
    if (c.universe) {
        for (const auto& t : *c.universe) {
            if (!sectors.count(t)) {
                throw ConfigError("universe: ticker '" + t + "' has no row in " + c.paths.sectors.string());
            }
            tickers.push_back(t);
        }
        std::sort(tickers.begin(), tickers.end());
        tickers.erase(std::unique(tickers.begin(), tickers.end()), tickers.end());
    } else {
        for (const auto& [t, s] : sectors) tickers.push_back(t);
    }
    if (tickers.empty()) throw ConfigError("paths.sectors: no tickers in " + c.paths.sectors.string());
    for (const auto& t : tickers) {
        const auto p = prices / (t + ".csv");
        if (!fs::exists(p)) throw ConfigError("paths.prices: missing " + p.string());
    }

    std::vector<market::IngestResult> results(tickers.size());
    std::mutex err_mu;
    std::string first_error;
    parallel_for(
        tickers.size(),
        [&](std::size_t i) {
            const auto& t = tickers[i];
            try {
                const auto base = market::read_daily_csv(prices / (t + ".csv"), t);
                std::optional<market::RawSeries> alt;
                if (!c.paths.alt_prices.empty() && fs::exists(c.paths.alt_prices / (t + ".csv"))) {
                    alt = market::read_daily_csv(c.paths.alt_prices / (t + ".csv"), t);
                }
                results[i] = market::ingest_stock(base, alt ? &*alt : nullptr, sectors.at(t), c.ingest);
            } catch (const std::exception& e) {
                // unreadable input is a hard error, not a rejection
                std::lock_guard lock(err_mu);
                if (first_error.empty()) first_error = e.what();
            }
        },
        workers_of(c));
    if (!first_error.empty()) throw UsageError(first_error);

    fs::remove_all(c.run_dir / "clean");
    fs::remove_all(c.run_dir / "reconciliation");
    fs::create_directories(c.run_dir / "clean");

    std::vector<market::WeeklySeries> weekly;
    std::vector<market::ReconciliationReport> reports;
    std::ostringstream table;
    table << "ticker,sector,kept,weeks,reason\n";
    CsvWriter w(table);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        auto& r = results[i];
        const auto& sector = sectors.at(tickers[i]);
        if (r.report) {
            fs::create_directories(c.run_dir / "reconciliation");
            write_text_file(c.run_dir / "reconciliation" / (tickers[i] + ".txt"), r.report->to_text());
            reports.push_back(*r.report);
        }
        if (r.kept) {
            ++kept;
            write_text_file(c.run_dir / "clean" / (tickers[i] + ".csv"), market::daily_csv(r.daily));
            weekly.push_back(r.weekly);
        } else {
            log::warn("ingest: dropped " + tickers[i] + ": " + r.reason);
        }
        w.row({tickers[i], sector, r.kept ? "1" : "0", std::to_string(r.kept ? r.weekly.weeks.size() : 0), r.reason});
    }
    if (!reports.empty()) write_text_file(c.run_dir / "reconciliation_summary.txt", market::summarize(reports).to_text());
    write_text_file(c.run_dir / "weekly.csv", market::weekly_csv(weekly));
    write_text_file(c.run_dir / "ingest.csv", table.str());
    log::info("ingest: kept " + std::to_string(kept) + " of " + std::to_string(tickers.size()) + " stocks");
    if (kept == 0) throw UsageError("ingest: every stock was rejected, see " + (c.run_dir / "ingest.csv").string());
}

// ---- features

std::vector<std::pair<std::string, std::string>> kept_stocks(const fs::path& run_dir) {
    const auto path = need_file(run_dir, "ingest.csv", "ingest");
    const auto t = CsvTable::read(path);
    const auto tick = t.column("ticker"), sect = t.column("sector"), kept = t.column("kept");
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& row : t.rows()) {
        if (row[kept] == "1") out.emplace_back(row[tick], row[sect]);
    }
    return out;
}

void cmd_features(const RunConfig& c) {
    const auto stocks = kept_stocks(c.run_dir);
    std::map<std::string, std::vector<features::QuarterlyReport>> reports;
    if (!c.paths.reports.empty()) reports = features::read_reports_csv(c.paths.reports);
    else log::warn("features: no paths.reports, valuation ratios stay missing");

    std::map<std::string, features::SentimentWeeks> sentiment;
    if (!c.paths.sentiment.empty()) {
        sentiment = features::read_sentiment_csv(c.paths.sentiment);
    } else if (!c.paths.scored_articles.empty()) {
        const auto scored = features::read_scored_articles_csv(c.paths.scored_articles);
        sentiment = features::weekly_sentiment(scored);
        write_text_file(c.run_dir / "sentiment_weekly.csv", features::sentiment_csv(sentiment));
    } else {
        log::warn("features: no sentiment input, the sentiment column stays missing");
    }

    std::vector<std::vector<features::WeeklyFeatureRow>> per(stocks.size());
    const std::vector<features::QuarterlyReport> none;
    const features::SentimentWeeks no_sentiment;
    std::mutex err_mu;
    std::string first_error;
    parallel_for(
        stocks.size(),
        [&](std::size_t i) {
            const auto& [ticker, sector] = stocks[i];
            try {
                const auto path = c.run_dir / "clean" / (ticker + ".csv");
                if (!fs::exists(path)) throw UsageError("missing " + path.string() + " (run `stackcast ingest` again)");
                const auto raw = market::read_daily_csv(path, ticker);
                std::vector<Date> dates;
                for (const auto& r : raw.rows) dates.push_back(r.date);
                const auto daily = market::repair(raw, dates, sector);
                const auto rit = reports.find(ticker);
                const auto sit = sentiment.find(ticker);
                auto rows = features::stock_features(daily, rit == reports.end() ? none : rit->second,
                                                     sit == sentiment.end() ? no_sentiment : sit->second);
                for (auto& r : rows) {
                    r.ticker = ticker;
                    r.sector = sector;
                }
                per[i] = std::move(rows);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (first_error.empty()) first_error = ticker + ": " + e.what();
            }
        },
        workers_of(c));
    if (!first_error.empty()) throw UsageError(first_error);

    std::vector<features::WeeklyFeatureRow> all;
    for (auto& p : per) all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    write_text_file(c.run_dir / "features.csv", features::features_csv(all));
    log::info("features: " + std::to_string(all.size()) + " weekly rows for " + std::to_string(stocks.size()) +
              " stocks");
}

// ---- link

void cmd_link(const RunConfig& c) {
    const auto rules = c.paths.rules.empty() ? text::default_rules() : text::load_rules(c.paths.rules);
    const auto articles = text::read_articles(need_path(c.paths.articles, "paths.articles"));
    const auto table = text::EmbeddingTable::load(need_path(c.paths.embeddings, "paths.embeddings"));
    const auto names = text::read_names_csv(need_path(c.paths.names, "paths.names"));

    std::set<std::string> distinct;
    for (const auto& k : text::keyword_values(articles)) {
        auto n = text::normalize_name(k, rules);
        if (!n.empty()) distinct.insert(std::move(n));
    }
    const std::vector<std::string> keywords(distinct.begin(), distinct.end());
    const auto index = text::index_keywords(keywords, table);

    std::vector<std::pair<std::string, std::string>> tickers(names.begin(), names.end());
    if (c.universe) {
        std::erase_if(tickers, [&](const auto& p) {
            return std::find(c.universe->begin(), c.universe->end(), p.first) == c.universe->end();
        });
    }
    std::vector<std::vector<text::EntityLink>> per(tickers.size());
    parallel_for(
        tickers.size(),
        [&](std::size_t i) {
            per[i] = text::match_candidates(tickers[i].first, text::normalize_name(tickers[i].second, rules), index,
                                            table, c.link);
        },
        workers_of(c));
    std::vector<text::EntityLink> all, confirmed;
    for (auto& p : per) {
        for (auto& l : p) {
            if (l.confirmed) confirmed.push_back(l);
            all.push_back(std::move(l));
        }
    }
    write_text_file(c.run_dir / "link_candidates.csv", text::candidates_csv(all));
    write_text_file(c.run_dir / "links.csv", text::links_csv(confirmed));
    log::info("link: " + std::to_string(keywords.size()) + " distinct keywords, " + std::to_string(all.size()) +
              " candidates, " + std::to_string(confirmed.size()) + " confirmed");
}

// ---- backtest

void cmd_backtest(const RunConfig& c) {
    const auto& range = require_range(c);
    const auto path = need_file(c.run_dir, "features.csv", "features");
    auto panel = backtest::make_panel(features::read_features_csv(path));
    panel = backtest::restrict_panel(panel, range, c.universe ? &*c.universe : nullptr);
    std::vector<std::string> universe;
    for (const auto& s : panel.stocks) universe.push_back(s.ticker);

    backtest::WalkForwardOptions o;
    o.specs = c.specs;
    o.budget = c.budget;
    o.save_models = c.save_models;
    o.workers = c.workers;
    log::info("backtest: " + std::to_string(universe.size()) + " stocks, " + std::to_string(c.specs.size()) +
              " model specs, " + format_date(range.start) + " to " + format_date(range.end));
    const auto r = backtest::run_walk_forward(panel, range, o);

    write_text_file(c.run_dir / "manifest.json", manifest_json(c, universe));
    write_text_file(c.run_dir / "predictions.csv", models::predictions_csv(r.predictions));
    write_text_file(c.run_dir / "realized.csv", backtest::realized_csv(r.realized));
    write_text_file(c.run_dir / "skips.csv", backtest::skips_csv(r.skips));
    write_text_file(c.run_dir / "fits.json", backtest::fits_json(r.fits) + "\n");

    fs::remove_all(c.run_dir / "models");
    if (!r.models.empty()) {
        fs::create_directories(c.run_dir / "models");
        std::map<std::string, std::vector<models::ModelRecord>> by_id;
        for (const auto& m : r.models) by_id[m.model.model_id].push_back(m);
        for (const auto& [id, recs] : by_id) models::write_models(c.run_dir / "models" / (id + ".scmd"), recs);
    }
    log::info("backtest: " + std::to_string(r.predictions.size()) + " predictions, " +
              std::to_string(r.skips.size()) + " skips, " + std::to_string(r.fits.size()) + " fits");
}

// ---- ensemble

std::string ensemble_fits_json(const std::vector<ensemble::EnsembleFit>& fits) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : fits) {
        nlohmann::ordered_json j;
        j["pool"] = f.pool;
        j["window_start"] = format_date(f.window_start);
        j["window_end"] = format_date(f.window_end);
        j["rows"] = f.rows;
        j["model_ids"] = f.model_ids;
        j["weights"] = std::vector<double>(f.weights.data(), f.weights.data() + f.weights.size());
        j["residual_norm"] = f.residual_norm;
        j["one_hot_residual_norms"] = f.one_hot_residual_norms;
        arr.push_back(std::move(j));
    }
    return arr.dump(1) + "\n";
}

void cmd_ensemble(const RunConfig& c) {
    const auto& range = require_range(c);
    const auto preds = models::read_predictions_csv(need_file(c.run_dir, "predictions.csv", "backtest"));
    const auto realized = backtest::read_realized_csv(need_file(c.run_dir, "realized.csv", "backtest"));
    std::set<std::string> ids;
    for (const auto& p : preds) ids.insert(p.model_id);
    auto check = [&](const std::vector<std::string>& wanted, const std::string& field) {
        for (const auto& id : wanted) {
            if (!ids.count(id)) {
                throw ConfigError(field + ": no predictions for model '" + id + "' in " +
                                  (c.run_dir / "predictions.csv").string());
            }
        }
    };
    check(c.ensemble.base_ids, "ensemble.base_ids");
    if (c.ensemble.index) check(c.ensemble.index_ids, "ensemble.index_ids");

    const auto r = ensemble::run_ensemble(preds, realized, range, c.ensemble);
    write_text_file(c.run_dir / "ensemble_predictions.csv", models::predictions_csv(r.predictions));
    write_text_file(c.run_dir / "ensemble_skips.csv", backtest::skips_csv(r.skips));
    write_text_file(c.run_dir / "weights.csv", ensemble::weights_csv(r.fits, c.ensemble.per_stock));
    write_text_file(c.run_dir / "ensemble_fits.json", ensemble_fits_json(r.fits));
    if (c.ensemble.index) {
        write_text_file(c.run_dir / "index_weights.csv", ensemble::weights_csv(r.index_fits, false));
        write_text_file(c.run_dir / "index_fits.json", ensemble_fits_json(r.index_fits));
        write_text_file(c.run_dir / "index_realized.csv", backtest::realized_csv(r.index_realized));
    }
    std::size_t dominated = 0;
    for (const auto& f : r.fits) {
        for (double h : f.one_hot_residual_norms) {
            if (f.residual_norm > h * (1 + 1e-9) + 1e-12) ++dominated;
        }
    }
    if (dominated) log::warn("ensemble: " + std::to_string(dominated) + " fits worse than a single base model");
    log::info("ensemble: " + std::to_string(r.fits.size()) + " fits, " + std::to_string(r.predictions.size()) +
              " predictions, " + std::to_string(r.skips.size()) + " skips");
}

// ---- report

void write_slopes(const fs::path& path, const metrics::SlopeSummary& s) {
    std::ostringstream os;
    os << "group,slope,intercept,n\n";
    CsvWriter w(os);
    for (const auto& x : s.slopes) w.row({x.group, format_real(x.slope), format_real(x.intercept), std::to_string(x.n)});
    write_text_file(path, os.str());
}

void cmd_report(const RunConfig& c) {
    const auto& range = require_range(c);
    const auto schedule = backtest::build_schedule(range, models::Update::yearly);
    auto preds = models::read_predictions_csv(need_file(c.run_dir, "predictions.csv", "backtest"));
    auto realized = backtest::read_realized_csv(need_file(c.run_dir, "realized.csv", "backtest"));
    std::set<std::string> base_ids;
    for (const auto& p : preds) base_ids.insert(p.model_id);

    const auto ens_path = c.run_dir / "ensemble_predictions.csv";
    const bool have_ensemble = fs::exists(ens_path);
    if (have_ensemble) {
        const auto e = models::read_predictions_csv(ens_path);
        preds.insert(preds.end(), e.begin(), e.end());
    } else {
        log::warn("report: no ensemble predictions, run `stackcast ensemble` to include them");
    }
    const auto idx_path = c.run_dir / "index_realized.csv";
    const auto index = fs::exists(idx_path) ? backtest::read_realized_csv(idx_path) : ensemble::index_realized(realized);

    const auto up = metrics::always_up(realized, "always_up");
    const auto up_index = metrics::always_up(index, "always_up");
    preds.insert(preds.end(), up.begin(), up.end());
    preds.insert(preds.end(), up_index.begin(), up_index.end());
    realized.insert(realized.end(), index.begin(), index.end());

    const auto joined = metrics::join(preds, realized, schedule.evaluation_start);
    if (joined.empty()) throw UsageError("report: no predictions fall in the evaluation period");
    const auto records = metrics::aggregate(joined, ensemble::kIndexTicker);
    write_text_file(c.run_dir / "metrics.csv", metrics::metrics_csv(records));

    // DA by year for the pooled scopes
    {
        std::ostringstream os;
        os << "model_id,scope,year,da,n\n";
        CsvWriter w(os);
        for (const auto& r : records) {
            if (r.scope == "stock" || r.period == "full") continue;
            w.row({r.model_id, r.scope, r.period, format_real(r.m.da), std::to_string(r.m.n)});
        }
        write_text_file(c.run_dir / "da_by_year.csv", os.str());
    }

    // threshold summary per model over stock rows, scatter for the ensemble
    std::map<std::string, std::vector<metrics::Joined>> by_model;
    for (const auto& j : joined) {
        if (j.ticker != ensemble::kIndexTicker) by_model[j.model_id].push_back(j);
    }
    {
        std::ostringstream os;
        os << "model_id,n,theta_up,theta_down,up_frequency,up_realized_rate,up_mean_realized,down_frequency,"
              "down_accuracy,down_mean_predicted\n";
        CsvWriter w(os);
        for (const auto& [id, rows] : by_model) {
            const auto t = metrics::threshold_report(rows, c.report.theta_up, c.report.theta_down);
            auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
            w.row({id, std::to_string(t.n), format_real(t.theta_up), format_real(t.theta_down),
                   format_real(t.up_frequency), opt(t.up_realized_rate), opt(t.up_mean_realized),
                   format_real(t.down_frequency), opt(t.down_accuracy), opt(t.down_mean_predicted)});
        }
        write_text_file(c.run_dir / "threshold.csv", os.str());
    }
    const std::string scatter_id = have_ensemble ? c.ensemble.model_id : std::string();
    if (const auto it = by_model.find(scatter_id); it != by_model.end()) {
        std::ostringstream os;
        os << "ticker,week_end,predicted,realized\n";
        CsvWriter w(os);
        for (const auto& j : it->second) w.row({j.ticker, format_date(j.week_end), format_real(j.predicted), format_real(j.realized)});
        write_text_file(c.run_dir / "threshold_scatter.csv", os.str());
    }

    // summary table
    std::ostringstream s;
    s << "evaluation " << format_date(schedule.evaluation_start) << " to " << format_date(range.end) << "\n\n";
    auto table = [&](const std::string& scope) {
        s << "scope " << scope << "\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %10s %10s %8s\n", "model", "DA", "UDA", "DDA", "RMSE", "MAE",
                      "n");
        s << line;
        for (const auto& r : records) {
            if (r.scope != scope || r.period != "full") continue;
            std::snprintf(line, sizeof line, "%-22s %8s %8s %8s %10s %10s %8zu\n", r.model_id.c_str(),
                          fixed(r.m.da).c_str(), fixed(r.m.uda).c_str(), fixed(r.m.dda).c_str(),
                          fixed(r.m.rmse, 6).c_str(), fixed(r.m.mae, 6).c_str(), r.m.n);
            s << line;
        }
        s << "\n";
    };
    table("all_stocks");
    table("index");

    auto full_da = [&](const std::string& id, const std::string& scope) -> std::optional<double> {
        for (const auto& r : records) {
            if (r.model_id == id && r.scope == scope && r.period == "full") return r.m.da;
        }
        return std::nullopt;
    };
    if (have_ensemble) {
        const auto e = full_da(c.ensemble.model_id, "all_stocks");
        const auto u = full_da("always_up", "all_stocks");
        std::optional<double> best;
        std::string best_id;
        for (const auto& id : c.ensemble.base_ids) {
            const auto d = full_da(id, "all_stocks");
            if (d && (!best || *d > *best)) {
                best = d;
                best_id = id;
            }
        }
        if (e && u) s << "ensemble minus always_up DA: " << fixed(100 * (*e - *u), 2) << " points\n";
        if (e && best) s << "ensemble minus best base (" << best_id << ") DA: " << fixed(100 * (*e - *best), 2) << " points\n";
    }

    const auto feat_path = c.run_dir / "features.csv";
    if (fs::exists(feat_path)) {
        auto rows = features::read_features_csv(feat_path);
        std::erase_if(rows, [&](const auto& r) { return r.week_end < range.start || r.week_end > range.end; });
        const std::string name(features::feature_name(c.report.slope_feature));
        s << "\nslope of next-week return on " << name << "\n";
        for (auto [g, label] : {std::pair{metrics::SlopeGroup::year, "year"},
                                std::pair{metrics::SlopeGroup::company, "company"},
                                std::pair{metrics::SlopeGroup::sector, "sector"}}) {
            const auto sl = metrics::slope_diagnostics(rows, c.report.slope_feature, g);
            write_slopes(c.run_dir / (std::string("slopes_") + label + ".csv"), sl);
            s << "  by " << label << ": " << sl.positive << " positive, " << sl.negative << " negative, "
              << sl.skipped.size() << " skipped\n";
        }
    }
    write_text_file(c.run_dir / "summary.txt", s.str());
    log::info("report: " + std::to_string(records.size()) + " metric rows");
}

using Command = void (*)(const RunConfig&);

void dispatch(const std::string& name, Command fn, const Overrides& o) {
    const auto c = load(o);
    fs::create_directories(c.run_dir);
    open_log(c, name, o.verbose);
    log::info(name + ": run directory " + c.run_dir.string());
    fn(c);
}

void add_common(CLI::App* sub, Overrides& o, bool model_flags) {
    sub->add_option("-c,--config", o.config, "run configuration (JSON)")->required();
    sub->add_option("--run-dir", o.run_dir, "output directory (overrides run_dir)");
    sub->add_option("--workers", o.workers, "worker threads, 0 for all cores");
    sub->add_flag("-v,--verbose", o.verbose, "debug logging");
    sub->add_option("--start", o.start, "range start, YYYY-MM-DD");
    sub->add_option("--end", o.end, "range end, YYYY-MM-DD");
    if (!model_flags) return;
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--rf-trees", o.rf_trees, "random forest size");
    sub->add_option("--max-epochs", o.max_epochs, "network epoch cap");
    sub->add_option("--patience", o.patience, "early-stopping patience");
    sub->add_option("--finetune-epochs", o.finetune_epochs, "per-stock fine-tuning epochs");
    sub->add_option("--only", o.only, "run only these model ids");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"stackcast: weekly return forecasting with a stacked ensemble"};
    app.require_subcommand(1);
    Overrides o;

    synth::SynthOptions so;
    std::string synth_out = "synth";
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic data set and its config");
    synth_cmd->add_option("--out", synth_out, "output directory");
    synth_cmd->add_option("--stocks", so.stocks, "number of stocks")->check(CLI::Range(1, 10000));
    synth_cmd->add_option("--years", so.years, "calendar years")->check(CLI::Range(1, 100));
    synth_cmd->add_option("--start-year", so.start_year, "first year")->check(CLI::Range(1900, 2200));
    synth_cmd->add_option("--seed", so.seed, "generator seed");

    const std::vector<std::tuple<std::string, std::string, Command, bool>> steps = {
        {"ingest", "reconcile, repair and aggregate prices", cmd_ingest, false},
        {"features", "weekly features from the cleaned prices", cmd_features, false},
        {"link", "match news keywords to tickers", cmd_link, false},
        {"backtest", "walk-forward fits and predictions", cmd_backtest, true},
        {"ensemble", "stack the base predictions", cmd_ensemble, false},
        {"report", "metrics and diagnostics", cmd_report, false},
        {"run", "ingest, features, backtest, ensemble and report", nullptr, true},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, fn, model_flags] : steps) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, o, model_flags);
        subs.push_back(sub);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (synth_cmd->parsed()) {
            const auto stocks = synth::generate(so);
            synth::write_synth(stocks, so, synth_out);
            out << "wrote " << stocks.size() << " synthetic stocks to " << synth_out << "\n";
            return 0;
        }
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (!subs[i]->parsed()) continue;
            const auto& name = std::get<0>(steps[i]);
            if (name == "run") {
                for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
                    if (std::get<0>(steps[k]) == "link") continue;
                    dispatch(std::get<0>(steps[k]), std::get<2>(steps[k]), o);
                }
            } else {
                dispatch(name, std::get<2>(steps[i]), o);
            }
        }
    } catch (const std::exception& e) {
        log::set_file({});
        err << "error: " << e.what() << "\n";
        return 1;
    }
    log::set_file({});
    return 0;
}

}  // namespace stackcast::cli
