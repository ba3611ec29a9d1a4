#include "doctest.h"

#include <bit>
#include <map>
#include <set>

#include "stackcast/backtest/walk_forward.hpp"
#include "synth_panel.hpp"

using namespace stackcast;
using namespace stackcast::backtest;

namespace {

models::TrainingBudget tiny_budget() {
    models::TrainingBudget b;
    b.rf_trees = 8;
    b.max_epochs = 3;
    b.patience = 1;
    b.finetune_epochs = 1;
    return b;
}

synth::SynthOptions small_synth() {
    synth::SynthOptions o;
    o.stocks = 8;
    o.years = 5;
    o.seed = 11;
    return o;
}

const DateRange kRange{make_date(2012, 1, 1), end_of_year(2016)};

WalkForwardOptions all_specs() {
    WalkForwardOptions o;
    o.specs = models::default_specs(5);
    o.budget = tiny_budget();
    return o;
}

using Key = std::tuple<std::string, std::string, Date>;

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

TEST_CASE("schedule: yearly boundaries over twenty years") {
    const auto s = build_schedule({make_date(2000, 1, 1), end_of_year(2019)}, models::Update::yearly);
    CHECK(s.warmup_end == make_date(2001, 12, 31));
    REQUIRE(s.update_boundaries.size() == 17);
    CHECK(s.update_boundaries.front() == make_date(2002, 12, 31));
    CHECK(s.update_boundaries.back() == make_date(2018, 12, 31));
    CHECK(s.evaluation_start == make_date(2003, 1, 1));
    for (std::size_t i = 1; i < s.update_boundaries.size(); ++i) CHECK(s.update_boundaries[i - 1] < s.update_boundaries[i]);
    const auto dates = s.fit_dates();
    CHECK(dates.size() == 18);
    CHECK(s.segment_end(dates.size() - 1) == make_date(2019, 12, 31));
}

TEST_CASE("schedule: monthly boundaries") {
    const auto s = build_schedule({make_date(2000, 1, 1), end_of_year(2005)}, models::Update::monthly);
    int in2003 = 0;
    for (Date d : s.update_boundaries) {
        if (year_of(d) == 2003) ++in2003;
        CHECK(d == end_of_month(year_of(d), unsigned(std::chrono::year_month_day{d}.month())));
    }
    CHECK(in2003 == 12);
    CHECK(s.update_boundaries.front() == make_date(2002, 1, 31));
    CHECK(s.update_boundaries.back() == make_date(2005, 11, 30));
}

TEST_CASE("schedule: too short a range is an error") {
    CHECK_THROWS_AS(build_schedule({make_date(2000, 1, 1), end_of_year(2001)}, models::Update::yearly),
                    std::invalid_argument);
    CHECK_NOTHROW(build_schedule({make_date(2000, 1, 1), make_date(2002, 3, 31)}, models::Update::yearly));
}

TEST_CASE("schedule: rolling window truncates to the available history") {
    CHECK_FALSE(window_floor(models::Lookback::all_past, make_date(2005, 12, 31)));
    // a ten-year floor before the first row leaves every row in the window
    CHECK(*window_floor(models::Lookback::rolling_10y, make_date(2005, 12, 31)) == make_date(1995, 12, 31));
    CHECK(years_before(make_date(2012, 2, 29), 10) == make_date(2002, 2, 28));
    CHECK(years_before(make_date(2012, 2, 29), 4) == make_date(2008, 2, 29));
}

TEST_CASE("panel: grouping and validation") {
    auto rows = synth::feature_rows(synth::generate(small_synth()));
    const auto panel = make_panel(rows);
    CHECK(panel.stocks.size() == 8);
    CHECK(panel.rows() == rows.size());
    for (const auto& s : panel.stocks) {
        for (std::size_t j = 1; j < s.rows.size(); ++j) CHECK(s.rows[j - 1].week_end < s.rows[j].week_end);
    }
    for (std::size_t i = 1; i < panel.stocks.size(); ++i) CHECK(panel.stocks[i - 1].ticker < panel.stocks[i].ticker);

    auto dup = rows;
    dup.push_back(rows.front());
    CHECK_THROWS_AS(make_panel(dup), std::invalid_argument);
    auto clash = rows;
    clash.back().sector = "Nowhere";
    CHECK_THROWS_AS(make_panel(clash), std::invalid_argument);

    const std::vector<std::string> some{panel.stocks[0].ticker, panel.stocks[2].ticker};
    const auto r = restrict_panel(panel, {make_date(2013, 1, 1), end_of_year(2014)}, &some);
    REQUIRE(r.stocks.size() == 2);
    for (const auto& s : r.stocks) {
        for (const auto& row : s.rows) CHECK(year_of(row.week_end) >= 2013);
        for (const auto& row : s.rows) CHECK(year_of(row.week_end) <= 2014);
    }
    const std::vector<std::string> bad{"NOPE"};
    CHECK_THROWS_AS(restrict_panel(panel, kRange, &bad), std::invalid_argument);
}

TEST_CASE("input frames read only the past") {
    const auto panel = testutil::panel_of(synth::generate(small_synth()));
    const auto& s = panel.stocks[0];
    for (const auto& spec : models::default_specs(1)) {
        const auto f = input_frame(s, 40, spec);
        REQUIRE(f);
        CHECK(f->steps == models::input_steps(spec.family));
        if (spec.family == models::Family::arima) {
            // newest value last, NaN before the series start
            CHECK(f->X(0, Eigen::Index(models::kArimaWindow - 1)) == *s.rows[40].x[0]);
            CHECK(std::isnan(f->X(0, 0)));
        }
    }
    auto lstm = models::default_specs(1)[4];
    CHECK_FALSE(input_frame(s, 1, lstm));
    CHECK(input_frame(s, 2, lstm));
}

TEST_CASE("walk-forward: complete, causal and deterministic") {
    const auto panel = testutil::panel_of(synth::generate(small_synth()));
    const auto opts = all_specs();
    const auto a = run_walk_forward(panel, kRange, opts);
    const auto b = run_walk_forward(panel, kRange, opts);

    REQUIRE(a.predictions.size() == b.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) {
        CHECK(a.predictions[i].model_id == b.predictions[i].model_id);
        CHECK(a.predictions[i].ticker == b.predictions[i].ticker);
        CHECK(a.predictions[i].week_end == b.predictions[i].week_end);
        CHECK(same_bits(a.predictions[i].value, b.predictions[i].value));
    }
    REQUIRE(a.fits.size() == b.fits.size());
    for (std::size_t i = 0; i < a.fits.size(); ++i) CHECK(a.fits[i].window_hash == b.fits[i].window_hash);
    CHECK(models::encode_models(a.models) == models::encode_models(b.models));

    // every prediction reads strictly earlier data
    REQUIRE(a.input_dates.size() == a.predictions.size());
    for (std::size_t i = 0; i < a.predictions.size(); ++i) CHECK(a.input_dates[i] < a.predictions[i].week_end);

    // training windows end at the fit date and respect the lookback
    for (const auto& f : a.fits) {
        if (!f.window_last) continue;
        CHECK(*f.window_last <= f.fit_date);
        CHECK(*f.window_first > f.fit_date - std::chrono::days{3660});
    }

    // each (model, ticker, target week) after the first fit has a prediction or a skip, never both
    std::set<Key> have;
    for (const auto& p : a.predictions) CHECK(have.insert({p.model_id, p.ticker, p.week_end}).second);
    for (const auto& s : a.skips) {
        CHECK_FALSE(s.reason.empty());
        CHECK(have.insert({s.model_id, s.ticker, s.week_end}).second);
    }
    std::size_t expected = 0;
    for (const auto& spec : opts.specs) {
        for (const auto& r : a.realized) {
            ++expected;
            CHECK(have.count({spec.id, r.ticker, r.week_end}) == 1);
        }
    }
    CHECK(have.size() == expected);
    const double coverage = double(a.predictions.size()) / double(expected);
    MESSAGE("coverage " << coverage);
    CHECK(coverage >= 0.99);

    // realized starts after the first fit and round-trips through its csv
    for (const auto& r : a.realized) CHECK(r.week_end > make_date(2013, 12, 31));
    const auto back = parse_realized_csv(realized_csv(a.realized));
    REQUIRE(back.size() == a.realized.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(same_bits(back[i].value, a.realized[i].value));

    // only the newest fit of each (spec, pool) is kept by default
    std::set<std::pair<std::string, std::string>> kept;
    for (const auto& m : a.models) CHECK(kept.insert({m.model.model_id, m.manifest_json}).second);
}

TEST_CASE("walk-forward: later inputs never change earlier predictions") {
    const auto stocks = synth::generate(small_synth());
    const auto panel = testutil::panel_of(stocks);
    auto opts = all_specs();
    const auto base = run_walk_forward(panel, kRange, opts);

    for (Date t : {make_date(2014, 6, 13), make_date(2015, 12, 31)}) {
        opts.horizon = t;
        const auto mutated = run_walk_forward(testutil::panel_of(testutil::mutate_after(stocks, t, 99)), kRange, opts);
        std::map<Key, double> got;
        for (const auto& p : mutated.predictions) got[{p.model_id, p.ticker, p.week_end}] = p.value;
        std::size_t compared = 0, differ = 0;
        for (const auto& p : base.predictions) {
            if (p.week_end > t) continue;
            const auto it = got.find({p.model_id, p.ticker, p.week_end});
            REQUIRE(it != got.end());
            ++compared;
            if (!same_bits(it->second, p.value)) ++differ;
        }
        MESSAGE("t=" << format_date(t) << " compared " << compared);
        CHECK(compared > 0);
        CHECK(differ == 0);
    }

    // the mutation itself is visible after t
    const auto later = run_walk_forward(testutil::panel_of(testutil::mutate_after(stocks, make_date(2014, 6, 13), 99)),
                                        kRange, all_specs());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < later.predictions.size() && i < base.predictions.size(); ++i) {
        if (!same_bits(later.predictions[i].value, base.predictions[i].value)) ++changed;
    }
    CHECK(changed > 0);
}

TEST_CASE("walk-forward: short pools are skipped with a reason") {
    auto o = small_synth();
    o.stocks = 2;
    o.years = 4;  // never reaches the 500 rows a feed-forward fit needs
    const auto panel = testutil::panel_of(synth::generate(o));
    WalkForwardOptions opts;
    opts.budget = tiny_budget();
    for (const auto& s : models::default_specs(3)) {
        if (s.id == "ffnn") opts.specs.push_back(s);
    }
    const auto r = run_walk_forward(panel, kRange, opts);
    CHECK(r.predictions.empty());
    REQUIRE_FALSE(r.skips.empty());
    CHECK(r.skips.size() == r.realized.size());
    CHECK(r.skips.front().reason.find("insufficient training rows") == 0);
    for (const auto& f : r.fits) CHECK_FALSE(f.fitted);
}

TEST_CASE("walk-forward: spec validation") {
    const auto panel = testutil::panel_of(synth::generate(small_synth()));
    WalkForwardOptions opts;
    opts.budget = tiny_budget();
    auto s = models::default_specs(1)[1];
    opts.specs = {s, s};
    CHECK_THROWS_WITH_AS(run_walk_forward(panel, kRange, opts), "duplicate model id 'linear'", std::invalid_argument);
    s.feature_set.pop_back();
    opts.specs = {s};
    CHECK_THROWS_AS(run_walk_forward(panel, kRange, opts), std::invalid_argument);
}

TEST_CASE("skips csv header") {
    const auto text = skips_csv({{"rf", "AAA", make_date(2014, 1, 3), "a, b"}});
    CHECK(text == "model_id,ticker,week_end,reason\nrf,AAA,2014-01-03,\"a, b\"\n");
}
