#include "stackcast/backtest/walk_forward.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "stackcast/common/csv.hpp"
#include "stackcast/common/log.hpp"
#include "stackcast/common/parallel.hpp"
#include "stackcast/common/stats.hpp"

namespace stackcast::backtest {

namespace {

using features::Feature;
using models::Family;

// FNV-1a over the bytes the fit reads.
struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void add(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    }
    void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
};

double raw(const MaybeReal& v) { return v ? *v : NAN; }

struct Pool {
    std::string name;
    std::vector<std::size_t> stocks;
};

std::vector<Pool> pools_for(const Panel& panel, models::Scope scope) {
    std::vector<Pool> out;
    switch (scope) {
        case models::Scope::per_stock:
            for (std::size_t i = 0; i < panel.stocks.size(); ++i) out.push_back({panel.stocks[i].ticker, {i}});
            break;
        case models::Scope::per_sector: {
            std::map<std::string, std::vector<std::size_t>> by;
            for (std::size_t i = 0; i < panel.stocks.size(); ++i) by[panel.stocks[i].sector].push_back(i);
            for (auto& [s, idx] : by) out.push_back({s, std::move(idx)});
            break;
        }
        case models::Scope::all_stock: {
            Pool p{"all", {}};
            for (std::size_t i = 0; i < panel.stocks.size(); ++i) p.stocks.push_back(i);
            out.push_back(std::move(p));
            break;
        }
    }
    return out;
}

// Targets for a sample ending at row j: one per output step.
std::optional<std::vector<double>> sample_targets(const StockRows& s, std::size_t j, Family family) {
    const std::size_t k = family == Family::lstm2 || family == Family::lstm1_finetune ? models::kSequenceLength : 1;
    if (j + 1 < k) return std::nullopt;
    std::vector<double> out;
    for (std::size_t i = j + 1 - k; i <= j; ++i) {
        if (!s.rows[i].target) return std::nullopt;
        out.push_back(*s.rows[i].target);
    }
    return out;
}

struct TaskOutput {
    std::vector<models::Prediction> predictions;
    std::vector<Date> input_dates;
    std::vector<Skip> skips;
    FitRecord fit;
    std::optional<models::ModelRecord> model;
};

std::string model_manifest(const models::ModelSpec& spec, const FitRecord& fit, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["model_id"] = spec.id;
    j["family"] = models::to_string(spec.family);
    j["scope"] = models::to_string(spec.scope);
    j["lookback"] = models::to_string(spec.lookback);
    j["update"] = models::to_string(spec.update);
    j["columns"] = fit.columns;
    j["seed"] = seed;
    j["pool"] = fit.pool;
    j["fit_date"] = format_date(fit.fit_date);
    j["window_first"] = fit.window_first ? format_date(*fit.window_first) : "";
    j["window_last"] = fit.window_last ? format_date(*fit.window_last) : "";
    j["rows"] = fit.rows;
    j["window_hash"] = fit.window_hash;
    return j.dump();
}

TaskOutput run_task(const Panel& panel, const models::ModelSpec& spec, const Pool& pool, Date fit_date,
                    Date segment_end, const models::TrainingBudget& budget, bool keep_model) {
    TaskOutput out;
    auto& fit = out.fit;
    fit.model_id = spec.id;
    fit.pool = pool.name;
    fit.fit_date = fit_date;
    fit.columns = models::column_names(spec);
    const auto floor = window_floor(spec.lookback, fit_date);

    // training samples: target week inside (floor, fit_date]
    std::vector<models::FeatureFrame> frames;
    std::vector<std::vector<double>> targets;
    Fnv hash;
    for (std::size_t si : pool.stocks) {
        const auto& s = panel.stocks[si];
        hash.add(hash_string(s.ticker));
        for (std::size_t j = 0; j + 1 < s.rows.size(); ++j) {
            const Date t = *s.target_week(j);
            if (t > fit_date) break;
            if (floor && t <= *floor) continue;
            auto y = sample_targets(s, j, spec.family);
            if (!y) continue;
            auto f = input_frame(s, j, spec);
            if (!f) continue;
            hash.add(std::uint64_t(t.time_since_epoch().count()));
            for (Eigen::Index c = 0; c < f->X.cols(); ++c) hash.add(f->X(0, c));
            for (double v : *y) hash.add(v);
            fit.window_first = fit.window_first ? std::min(*fit.window_first, t) : t;
            fit.window_last = fit.window_last ? std::max(*fit.window_last, t) : t;
            frames.push_back(std::move(*f));
            targets.push_back(std::move(*y));
        }
    }
    fit.rows = frames.size();
    fit.window_hash = hash.h;

    auto skip_segment = [&](const std::string& reason) {
        for (std::size_t si : pool.stocks) {
            const auto& s = panel.stocks[si];
            for (std::size_t j = 0; j + 1 < s.rows.size(); ++j) {
                const Date t = *s.target_week(j);
                if (t > fit_date && t <= segment_end) out.skips.push_back({spec.id, s.ticker, t, reason});
            }
        }
    };

    const std::size_t need = models::min_training_rows(spec.family, fit.columns.size());
    if (frames.size() < need) {
        fit.detail = "insufficient training rows: " + std::to_string(frames.size()) + " < " + std::to_string(need);
        log::debug(spec.id + " " + pool.name + " " + format_date(fit_date) + ": " + fit.detail);
        skip_segment(fit.detail);
        return out;
    }

    models::TrainingSet data;
    data.frame.columns = fit.columns;
    data.frame.steps = frames.front().steps;
    data.frame.X.resize(Eigen::Index(frames.size()), frames.front().X.cols());
    data.targets.resize(Eigen::Index(frames.size()), Eigen::Index(targets.front().size()));
    for (std::size_t r = 0; r < frames.size(); ++r) {
        data.frame.X.row(Eigen::Index(r)) = frames[r].X.row(0);
        for (std::size_t k = 0; k < targets[r].size(); ++k) data.targets(Eigen::Index(r), Eigen::Index(k)) = targets[r][k];
        data.frame.keys.push_back(frames[r].keys.front());
    }
    frames.clear();

    const std::uint64_t seed = mix_seed(spec.seed, hash_string(pool.name + "|" + format_date(fit_date)));
    models::FittedModel model;
    try {
        model = models::fit_model(spec, data, budget, seed);
    } catch (const std::exception& e) {
        fit.detail = std::string("fit failed: ") + e.what();
        log::error(spec.id + " " + pool.name + " " + format_date(fit_date) + ": " + fit.detail);
        skip_segment(fit.detail);
        return out;
    }
    fit.fitted = true;
    fit.transforms = model.transforms;
    if (const auto* a = std::get_if<models::ArimaModel>(&model.body)) {
        fit.detail = "order (" + std::to_string(a->p) + "," + std::to_string(a->d) + "," + std::to_string(a->q) + ")";
    }

    // predictions for target weeks in (fit_date, segment_end]
    for (std::size_t si : pool.stocks) {
        const auto& s = panel.stocks[si];
        std::vector<std::size_t> js;
        models::FeatureFrame batch;
        std::vector<Eigen::RowVectorXd> rows;
        for (std::size_t j = 0; j + 1 < s.rows.size(); ++j) {
            const Date t = *s.target_week(j);
            if (t <= fit_date) continue;
            if (t > segment_end) break;
            auto f = input_frame(s, j, spec);
            if (!f) {
                out.skips.push_back({spec.id, s.ticker, t, "not enough history for the model input"});
                continue;
            }
            if (batch.columns.empty()) {
                batch.columns = f->columns;
                batch.steps = f->steps;
            }
            rows.push_back(f->X.row(0));
            js.push_back(j);
        }
        if (js.empty()) continue;
        batch.X.resize(Eigen::Index(rows.size()), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) batch.X.row(Eigen::Index(r)) = rows[r];
        batch.keys.assign(rows.size(), s.ticker);
        const Eigen::VectorXd p = models::predict(model, batch);
        for (std::size_t r = 0; r < js.size(); ++r) {
            const Date t = *s.target_week(js[r]);
            if (!std::isfinite(p(Eigen::Index(r)))) {
                out.skips.push_back({spec.id, s.ticker, t, "non-finite prediction"});
                continue;
            }
            out.predictions.push_back({s.ticker, t, spec.id, p(Eigen::Index(r))});
            const Date read = std::max(s.rows[js[r]].week_end, fit.window_last.value_or(s.rows[js[r]].week_end));
            out.input_dates.push_back(read);
        }
    }
    if (keep_model) out.model = models::ModelRecord{model_manifest(spec, fit, seed), std::move(model)};
    return out;
}

}  // namespace

std::optional<models::FeatureFrame> input_frame(const StockRows& stock, std::size_t j, const models::ModelSpec& spec) {
    models::FeatureFrame f;
    f.keys = {stock.ticker};
    if (spec.family == Family::arima) {
        f.columns = {std::string(features::feature_name(Feature::ret))};
        f.steps = models::kArimaWindow;
        f.X.resize(1, Eigen::Index(models::kArimaWindow));
        for (std::size_t k = 0; k < models::kArimaWindow; ++k) {
            const std::size_t back = models::kArimaWindow - 1 - k;
            f.X(0, Eigen::Index(k)) = back <= j ? raw(stock.rows[j - back][Feature::ret]) : NAN;
        }
        return f;
    }
    f.steps = models::input_steps(spec.family);
    if (j + 1 < f.steps) return std::nullopt;
    for (auto c : spec.feature_set) f.columns.emplace_back(features::feature_name(c));
    const std::size_t d = spec.feature_set.size();
    f.X.resize(1, Eigen::Index(f.steps * d));
    for (std::size_t s = 0; s < f.steps; ++s) {
        const auto& row = stock.rows[j + 1 - f.steps + s];
        for (std::size_t c = 0; c < d; ++c) f.X(0, Eigen::Index(s * d + c)) = raw(row[spec.feature_set[c]]);
    }
    return f;
}

WalkForwardResult run_walk_forward(const Panel& panel, const DateRange& range, const WalkForwardOptions& options) {
    struct Task {
        const models::ModelSpec* spec;
        const Pool* pool;
        Date fit_date, segment_end;
        bool keep;
    };
    std::vector<models::ModelSpec> specs = options.specs;
    std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < specs.size(); ++i) {
        models::validate(specs[i]);
        if (i > 0 && specs[i].id == specs[i - 1].id) throw std::invalid_argument("duplicate model id '" + specs[i].id + "'");
    }

    std::vector<std::vector<Pool>> pools;
    std::vector<Task> tasks;
    for (const auto& spec : specs) pools.push_back(pools_for(panel, spec.scope));
    std::optional<Date> first_fit;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto schedule = build_schedule(range, specs[k].update);
        const auto dates = schedule.fit_dates();
        first_fit = schedule.warmup_end;
        for (std::size_t i = 0; i < dates.size(); ++i) {
            if (options.horizon && dates[i] >= *options.horizon) break;
            const bool keep = options.save_models == SaveModels::all ||
                              (options.save_models == SaveModels::latest && i + 1 == dates.size());
            for (const auto& pool : pools[k]) tasks.push_back({&specs[k], &pool, dates[i], schedule.segment_end(i), keep});
        }
    }

    log::info("walk-forward: " + std::to_string(tasks.size()) + " fits over " + std::to_string(panel.stocks.size()) +
              " stocks");
    std::vector<TaskOutput> outputs(tasks.size());
    std::mutex progress_mutex;
    std::size_t done = 0;
    parallel_for(
        tasks.size(),
        [&](std::size_t i) {
            const auto& t = tasks[i];
            outputs[i] = run_task(panel, *t.spec, *t.pool, t.fit_date, t.segment_end, options.budget, t.keep);
            std::lock_guard lock(progress_mutex);
            ++done;
            if (done % 50 == 0 || done == tasks.size()) {
                log::debug("walk-forward: " + std::to_string(done) + "/" + std::to_string(tasks.size()) + " fits");
            }
        },
        options.workers == 0 ? default_workers() : options.workers);

    WalkForwardResult result;
    std::vector<std::pair<models::Prediction, Date>> preds;
    for (auto& o : outputs) {
        for (std::size_t i = 0; i < o.predictions.size(); ++i) preds.emplace_back(std::move(o.predictions[i]), o.input_dates[i]);
        for (auto& s : o.skips) result.skips.push_back(std::move(s));
        result.fits.push_back(std::move(o.fit));
        if (o.model) result.models.push_back(std::move(*o.model));
    }
    std::sort(preds.begin(), preds.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.model_id, a.first.ticker, a.first.week_end) <
               std::tie(b.first.model_id, b.first.ticker, b.first.week_end);
    });
    for (auto& [p, d] : preds) {
        result.predictions.push_back(std::move(p));
        result.input_dates.push_back(d);
    }
    std::sort(result.skips.begin(), result.skips.end(), [](const Skip& a, const Skip& b) {
        return std::tie(a.model_id, a.ticker, a.week_end) < std::tie(b.model_id, b.ticker, b.week_end);
    });

    if (first_fit) {
        for (const auto& s : panel.stocks) {
            for (std::size_t j = 0; j + 1 < s.rows.size(); ++j) {
                const Date t = *s.target_week(j);
                if (t <= *first_fit || !s.rows[j].target) continue;
                if (options.horizon && t > *options.horizon) break;
                result.realized.push_back({s.ticker, t, *s.rows[j].target});
            }
        }
    }
    log::info("walk-forward: " + std::to_string(result.predictions.size()) + " predictions, " +
              std::to_string(result.skips.size()) + " skipped target weeks");
    return result;
}

std::string realized_csv(const std::vector<Realized>& rows) {
    std::ostringstream os;
    os << "ticker,week_end,return\n";
    CsvWriter w(os);
    for (const auto& r : rows) w.row({r.ticker, format_date(r.week_end), format_real(r.value)});
    return os.str();
}

std::vector<Realized> parse_realized_csv(std::string_view text, std::string source) {
    const auto table = CsvTable::parse(text, source);
    const auto ct = table.column("ticker"), cw = table.column("week_end"), cr = table.column("return");
    std::vector<Realized> out;
    for (const auto& r : table.rows()) out.push_back({r[ct], parse_date(r[cw]), parse_real(r[cr])});
    return out;
}

std::vector<Realized> read_realized_csv(const std::filesystem::path& path) {
    return parse_realized_csv(read_text_file(path), path.string());
}

std::string skips_csv(const std::vector<Skip>& rows) {
    std::ostringstream os;
    os << "model_id,ticker,week_end,reason\n";
    CsvWriter w(os);
    for (const auto& s : rows) w.row({s.model_id, s.ticker, format_date(s.week_end), s.reason});
    return os.str();
}

std::string fits_json(const std::vector<FitRecord>& fits) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : fits) {
        nlohmann::ordered_json j;
        j["model_id"] = f.model_id;
        j["pool"] = f.pool;
        j["fit_date"] = format_date(f.fit_date);
        j["window_first"] = f.window_first ? format_date(*f.window_first) : "";
        j["window_last"] = f.window_last ? format_date(*f.window_last) : "";
        j["rows"] = f.rows;
        j["window_hash"] = f.window_hash;
        j["fitted"] = f.fitted;
        if (!f.detail.empty()) j["detail"] = f.detail;
        nlohmann::ordered_json ts = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < f.transforms.size(); ++c) {
            const auto& t = f.transforms[c];
            ts.push_back({{"column", f.columns[c]},
                          {"lambda", t.lambda},
                          {"mean", t.mean},
                          {"sd", t.sd},
                          {"cap", t.cap},
                          {"constant", t.constant}});
        }
        if (!ts.empty()) j["transforms"] = std::move(ts);
        arr.push_back(std::move(j));
    }
    return arr.dump(1);
}

}  // namespace stackcast::backtest
