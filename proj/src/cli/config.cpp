#include "stackcast/cli/config.hpp"

#include <cstdlib>
#include <set>

#include "json.hpp"
#include "stackcast/common/csv.hpp"

namespace stackcast::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) { throw ConfigError(field + ": " + why); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(where.empty() ? "config" : where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        if (!allowed.count(k)) fail(where.empty() ? k : where + "." + k, "unknown setting");
    }
}

std::string join_key(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

template <typename T>
std::optional<T> get(const json& j, const std::string& where, const std::string& key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const auto& v = j.at(key);
    const auto field = join_key(where, key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(field, "expected true or false");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
            fail(field, std::is_unsigned_v<T> ? "expected a non-negative integer" : "expected an integer");
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(field, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(field, "expected a string");
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); })) {
            fail(field, "expected a list of strings");
        }
    }
    return v.get<T>();
}

std::filesystem::path existing(const json& j, const std::string& where, const std::string& key,
                               const std::filesystem::path& base) {
    const auto s = get<std::string>(j, where, key);
    if (!s || s->empty()) return {};
    const std::filesystem::path p = std::filesystem::path(*s).is_absolute() ? std::filesystem::path(*s) : base / *s;
    if (!std::filesystem::exists(p)) fail(join_key(where, key), "no such file or directory: " + p.string());
    return p;
}

Date date_field(const json& j, const std::string& where, const std::string& key) {
    const auto s = get<std::string>(j, where, key);
    if (!s) fail(join_key(where, key), "missing");
    try {
        return parse_date(*s);
    } catch (const std::exception& e) {
        fail(join_key(where, key), e.what());
    }
}

models::ModelSpec parse_spec(const json& j, const std::string& where, std::uint64_t seed) {
    check_keys(j, where, {"id", "family", "scope", "lookback", "update", "features", "seed"});
    models::ModelSpec s;
    const auto id = get<std::string>(j, where, "id");
    if (!id || id->empty()) fail(where + ".id", "missing");
    s.id = *id;
    const auto fam = get<std::string>(j, where, "family");
    if (!fam) fail(where + ".family", "missing");
    const auto f = models::family_from_string(*fam);
    if (!f) fail(where + ".family", "unknown family '" + *fam + "'");
    s.family = *f;
    // defaults follow the family's standard configuration
    for (const auto& d : models::default_specs(seed)) {
        if (d.family == s.family) {
            s.scope = d.scope;
            s.lookback = d.lookback;
            s.update = d.update;
        }
    }
    if (const auto v = get<std::string>(j, where, "scope")) {
        const auto x = models::scope_from_string(*v);
        if (!x) fail(where + ".scope", "unknown scope '" + *v + "'");
        s.scope = *x;
    }
    if (const auto v = get<std::string>(j, where, "lookback")) {
        const auto x = models::lookback_from_string(*v);
        if (!x) fail(where + ".lookback", "unknown lookback '" + *v + "'");
        s.lookback = *x;
    }
    if (const auto v = get<std::string>(j, where, "update")) {
        const auto x = models::update_from_string(*v);
        if (!x) fail(where + ".update", "unknown update '" + *v + "'");
        s.update = *x;
    }
    s.feature_set = models::default_features(s.family);
    if (const auto v = get<std::vector<std::string>>(j, where, "features")) {
        s.feature_set.clear();
        for (const auto& name : *v) {
            const auto x = features::feature_from_name(name);
            if (!x) fail(where + ".features", "unknown feature '" + name + "'");
            s.feature_set.push_back(*x);
        }
    }
    s.seed = get<std::uint64_t>(j, where, "seed").value_or(seed);
    try {
        models::validate(s);
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    return s;
}

}  // namespace

std::filesystem::path resolve_run_dir(const std::filesystem::path& dir, const std::filesystem::path& base) {
    if (dir.is_absolute()) return dir;
    if (const char* root = std::getenv(kRunRootEnv); root && *root) return std::filesystem::path(root) / dir;
    return base / dir;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& config_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"seed", "run_dir", "paths", "universe", "range", "models", "budget", "save_models", "workers",
                       "ingest", "link", "ensemble", "report", "synth"});
    RunConfig c;
    c.config_dir = config_dir;
    const auto seed = get<std::uint64_t>(j, "", "seed");
    if (!seed) fail("seed", "missing (a seed is mandatory)");
    c.seed = *seed;
    c.run_dir = resolve_run_dir(get<std::string>(j, "", "run_dir").value_or("run"), config_dir);

    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        check_keys(p, "paths", {"prices", "alt_prices", "sectors", "reports", "sentiment", "scored_articles", "articles",
                                "embeddings", "names", "rules"});
        c.paths.prices = existing(p, "paths", "prices", config_dir);
        c.paths.alt_prices = existing(p, "paths", "alt_prices", config_dir);
        c.paths.sectors = existing(p, "paths", "sectors", config_dir);
        c.paths.reports = existing(p, "paths", "reports", config_dir);
        c.paths.sentiment = existing(p, "paths", "sentiment", config_dir);
        c.paths.scored_articles = existing(p, "paths", "scored_articles", config_dir);
        c.paths.articles = existing(p, "paths", "articles", config_dir);
        c.paths.embeddings = existing(p, "paths", "embeddings", config_dir);
        c.paths.names = existing(p, "paths", "names", config_dir);
        c.paths.rules = existing(p, "paths", "rules", config_dir);
        if (!c.paths.sentiment.empty() && !c.paths.scored_articles.empty()) {
            fail("paths.scored_articles", "give either paths.sentiment or paths.scored_articles, not both");
        }
    }
    c.universe = get<std::vector<std::string>>(j, "", "universe");

    if (j.contains("range")) {
        const auto& r = j.at("range");
        check_keys(r, "range", {"start", "end"});
        backtest::DateRange dr{date_field(r, "range", "start"), date_field(r, "range", "end")};
        if (dr.end <= dr.start) fail("range.end", "must be after range.start");
        c.range = dr;
    }

    if (j.contains("models")) {
        const auto& m = j.at("models");
        if (!m.is_array() || m.empty()) fail("models", "expected a non-empty list of model specs");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < m.size(); ++i) {
            auto s = parse_spec(m[i], "models[" + std::to_string(i) + "]", c.seed);
            if (!ids.insert(s.id).second) fail("models[" + std::to_string(i) + "].id", "duplicate id '" + s.id + "'");
            c.specs.push_back(std::move(s));
        }
    } else {
        c.specs = models::default_specs(c.seed);
    }

    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        check_keys(b, "budget", {"rf_trees", "max_epochs", "patience", "finetune_epochs"});
        c.budget.rf_trees = get<std::size_t>(b, "budget", "rf_trees").value_or(c.budget.rf_trees);
        c.budget.max_epochs = get<std::size_t>(b, "budget", "max_epochs").value_or(c.budget.max_epochs);
        c.budget.patience = get<std::size_t>(b, "budget", "patience").value_or(c.budget.patience);
        c.budget.finetune_epochs = get<std::size_t>(b, "budget", "finetune_epochs").value_or(c.budget.finetune_epochs);
        if (c.budget.rf_trees == 0) fail("budget.rf_trees", "must be positive");
        if (c.budget.max_epochs == 0) fail("budget.max_epochs", "must be positive");
    }
    if (const auto s = get<std::string>(j, "", "save_models")) {
        if (*s == "none") c.save_models = backtest::SaveModels::none;
        else if (*s == "latest") c.save_models = backtest::SaveModels::latest;
        else if (*s == "all") c.save_models = backtest::SaveModels::all;
        else fail("save_models", "expected none, latest or all");
    }
    c.workers = get<unsigned>(j, "", "workers").value_or(0);

    if (j.contains("ingest")) {
        const auto& g = j.at("ingest");
        check_keys(g, "ingest", {"min_years", "drop_threshold", "agreement_tolerance", "max_violation_fraction",
                                 "max_missing_run"});
        auto& o = c.ingest;
        o.min_years = get<double>(g, "ingest", "min_years").value_or(o.min_years);
        o.reconcile.drop_threshold = get<double>(g, "ingest", "drop_threshold").value_or(o.reconcile.drop_threshold);
        o.reconcile.agreement_tolerance =
            get<double>(g, "ingest", "agreement_tolerance").value_or(o.reconcile.agreement_tolerance);
        o.reconcile.max_violation_fraction =
            get<double>(g, "ingest", "max_violation_fraction").value_or(o.reconcile.max_violation_fraction);
        o.max_missing_run = get<std::size_t>(g, "ingest", "max_missing_run").value_or(o.max_missing_run);
        if (!(o.reconcile.drop_threshold > 0)) fail("ingest.drop_threshold", "must be positive");
        if (o.min_years < 0) fail("ingest.min_years", "must not be negative");
    }

    if (j.contains("link")) {
        const auto& l = j.at("link");
        check_keys(l, "link", {"k", "lcs_threshold", "cosine_threshold"});
        c.link.k = get<std::size_t>(l, "link", "k").value_or(c.link.k);
        c.link.lcs_threshold = get<double>(l, "link", "lcs_threshold").value_or(c.link.lcs_threshold);
        c.link.cosine_threshold = get<double>(l, "link", "cosine_threshold").value_or(c.link.cosine_threshold);
        if (c.link.k == 0) fail("link.k", "must be positive");
    }

    if (j.contains("ensemble")) {
        const auto& e = j.at("ensemble");
        check_keys(e, "ensemble", {"base_ids", "window_years", "per_stock", "index", "index_ids", "index_window_years"});
        auto& o = c.ensemble;
        o.base_ids = get<std::vector<std::string>>(e, "ensemble", "base_ids").value_or(o.base_ids);
        o.window_years = get<int>(e, "ensemble", "window_years").value_or(o.window_years);
        o.per_stock = get<bool>(e, "ensemble", "per_stock").value_or(o.per_stock);
        o.index = get<bool>(e, "ensemble", "index").value_or(o.index);
        o.index_ids = get<std::vector<std::string>>(e, "ensemble", "index_ids").value_or(o.index_ids);
        o.index_window_years = get<int>(e, "ensemble", "index_window_years").value_or(o.index_window_years);
        if (o.base_ids.empty()) fail("ensemble.base_ids", "must not be empty");
        if (o.window_years < 1) fail("ensemble.window_years", "must be at least 1");
        if (o.index_window_years < 1) fail("ensemble.index_window_years", "must be at least 1");
        if (o.index && o.index_ids.empty()) fail("ensemble.index_ids", "must not be empty");
    }

    if (j.contains("report")) {
        const auto& r = j.at("report");
        check_keys(r, "report", {"theta_up", "theta_down", "slope_feature"});
        c.report.theta_up = get<double>(r, "report", "theta_up").value_or(c.report.theta_up);
        c.report.theta_down = get<double>(r, "report", "theta_down").value_or(c.report.theta_down);
        if (const auto f = get<std::string>(r, "report", "slope_feature")) {
            const auto x = features::feature_from_name(*f);
            if (!x) fail("report.slope_feature", "unknown feature '" + *f + "'");
            c.report.slope_feature = *x;
        }
    }
    // "synth" records how a generated data set was made; nothing reads it back
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config: no such file: " + path.string());
    const auto dir = std::filesystem::absolute(path).parent_path();
    return parse_config(read_text_file(path), dir);
}

const backtest::DateRange& require_range(const RunConfig& config) {
    if (!config.range) fail("range", "missing (needs start and end dates)");
    return *config.range;
}

std::string manifest_json(const RunConfig& c, const std::vector<std::string>& universe) {
    nlohmann::ordered_json j;
    j["seed"] = c.seed;
    j["universe"] = universe;
    const auto& r = require_range(c);
    j["range"] = {{"start", format_date(r.start)}, {"end", format_date(r.end)}};
    const auto s = backtest::build_schedule(r, models::Update::yearly);
    j["schedule"] = {{"warmup_years", backtest::kWarmupYears},
                     {"warmup_end", format_date(s.warmup_end)},
                     {"evaluation_start", format_date(s.evaluation_start)},
                     {"rolling_years", backtest::kRollingYears}};
    nlohmann::ordered_json specs = nlohmann::ordered_json::array();
    for (const auto& m : c.specs) {
        nlohmann::ordered_json x;
        x["id"] = m.id;
        x["family"] = models::to_string(m.family);
        x["scope"] = models::to_string(m.scope);
        x["lookback"] = models::to_string(m.lookback);
        x["update"] = models::to_string(m.update);
        std::vector<std::string> f;
        for (auto v : m.feature_set) f.emplace_back(features::feature_name(v));
        x["features"] = f;
        x["seed"] = m.seed;
        specs.push_back(std::move(x));
    }
    j["models"] = std::move(specs);
    j["budget"] = {{"rf_trees", c.budget.rf_trees},
                   {"max_epochs", c.budget.max_epochs},
                   {"patience", c.budget.patience},
                   {"finetune_epochs", c.budget.finetune_epochs}};
    j["transforms"] = "fits.json";
    return j.dump(2) + "\n";
}

}  // namespace stackcast::cli
