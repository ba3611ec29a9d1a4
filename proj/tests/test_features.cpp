#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "indicator_oracle.hpp"
#include "stackcast/features/fundamentals.hpp"
#include "stackcast/features/indicators.hpp"
#include "stackcast/features/weekly_features.hpp"
#include "stackcast/market_data/weekly.hpp"

using namespace stackcast;
using namespace stackcast::features;
using market::DailySeries;

namespace {

DailySeries from_oracle_bars(const std::vector<oracle::Bar>& bars) {
    DailySeries s{"FIX", "Materials", {}};
    const auto days = testutil::weekdays(make_date(2019, 3, 4), bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& b = bars[i];
        s.bars.push_back(market::DailyBar{days[i], b.o, b.h, b.l, b.c, b.c, b.v, 0.0, 1.0});
    }
    return s;
}

std::vector<oracle::Bar> to_oracle_bars(const DailySeries& s) {
    std::vector<oracle::Bar> out;
    for (const auto& a : market::adjust(s)) out.push_back({a.open, a.high, a.low, a.close, a.volume});
    return out;
}

void check_close(const MaybeReal& got, const std::optional<double>& want, double tol) {
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(std::abs(*got - *want) <= tol * std::max(1.0, std::abs(*want)));
}

void check_against_oracle(const DailySeries& s, double tol) {
    const auto got = compute_indicators(s);
    const auto want = oracle::indicators(to_oracle_bars(s));
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        check_close(got[i].cci, want[i].cci, tol);
        check_close(got[i].macdh, want[i].macdh, tol);
        check_close(got[i].rsi, want[i].rsi, tol);
        check_close(got[i].kdj_k, want[i].k, tol);
        check_close(got[i].wr, want[i].wr, tol);
        check_close(got[i].atr_pct, want[i].atr_pct, tol);
        check_close(got[i].cmf, want[i].cmf, tol);
    }
}

}  // namespace

TEST_CASE("40-day fixture matches the spreadsheet oracle") {
    const auto s = from_oracle_bars(oracle::fixture40());
    check_against_oracle(s, 1e-9);

    // Oracle snapshot of the last row, frozen.
    const auto last = compute_indicators(s).back();
    CHECK(*last.cci == doctest::Approx(-41.615503043786759).epsilon(1e-9));
    CHECK(*last.macdh == doctest::Approx(-0.39579408934770843).epsilon(1e-9));
    CHECK(*last.rsi == doctest::Approx(46.559144704897804).epsilon(1e-9));
    CHECK(*last.kdj_k == doctest::Approx(31.752195660620078).epsilon(1e-9));
    CHECK(*last.wr == doctest::Approx(-75.892241925454002).epsilon(1e-9));
    CHECK(*last.atr_pct == doctest::Approx(3.0280196120924106).epsilon(1e-9));
    CHECK(*last.cmf == doctest::Approx(-0.11279390211569422).epsilon(1e-9));
}

TEST_CASE("random series match the oracle, including split-adjusted ones") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = testutil::random_series(rng, 35 + rng() % 300);
        if (trial % 3 == 0) {
            for (std::size_t i = 0; i < s.bars.size() / 2; ++i) s.bars[i].adj_close = s.bars[i].close * 0.5;
        }
        check_against_oracle(s, 1e-9);
    }
}

TEST_CASE("warm-up rows are missing") {
    std::mt19937_64 rng(1);
    const auto rows = compute_indicators(testutil::random_series(rng, 60));
    CHECK_FALSE(rows[18].cci.has_value());
    CHECK(rows[19].cci.has_value());
    CHECK_FALSE(rows[32].macdh.has_value());
    CHECK(rows[33].macdh.has_value());
    CHECK_FALSE(rows[13].rsi.has_value());
    CHECK(rows[14].rsi.has_value());
    CHECK_FALSE(rows[14].kdj_k.has_value());
    CHECK(rows[15].kdj_k.has_value());
    CHECK_FALSE(rows[12].wr.has_value());
    CHECK(rows[13].wr.has_value());
    CHECK_FALSE(rows[13].atr_pct.has_value());
    CHECK(rows[14].atr_pct.has_value());
    CHECK_FALSE(rows[18].cmf.has_value());
    CHECK(rows[19].cmf.has_value());
}

TEST_CASE("too short series is an error") {
    CHECK_THROWS_AS(compute_indicators(testutil::series_from_closes(std::vector<double>(34, 10.0))), market::DataError);
    CHECK_NOTHROW(compute_indicators(testutil::series_from_closes(std::vector<double>(35, 10.0))));
}

TEST_CASE("strictly increasing closes give RSI 100") {
    std::vector<double> c;
    for (int i = 0; i < 35; ++i) c.push_back(10.0 + i);
    for (const auto& r : compute_indicators(testutil::series_from_closes(c))) {
        if (r.rsi) CHECK(*r.rsi == 100.0);
    }
}

TEST_CASE("constant price gives the neutral values") {
    for (double p : {100.0, 100.1, 37.37}) {
        const auto rows = compute_indicators(testutil::series_from_closes(std::vector<double>(60, p)));
        const auto& r = rows.back();
        CHECK(*r.cci == 0.0);
        CHECK(*r.macdh == 0.0);
        CHECK(*r.atr_pct == 0.0);
        CHECK(*r.wr == -50.0);
        CHECK(*r.kdj_k == 50.0);
        CHECK(*r.cmf == 0.0);
        CHECK(*r.rsi == 50.0);
    }
}

TEST_CASE("range invariants over 10000 random sequences") {
    std::mt19937_64 rng(99);
    std::size_t rows_checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const auto s = testutil::random_series(rng, 35 + rng() % 40);
        for (const auto& r : compute_indicators(s)) {
            if (r.rsi && !(*r.rsi >= 0.0 && *r.rsi <= 100.0)) FAIL("rsi out of range " << *r.rsi);
            if (r.wr && !(*r.wr >= -100.0 && *r.wr <= 0.0)) FAIL("wr out of range " << *r.wr);
            if (r.cmf && !(*r.cmf >= -1.0 && *r.cmf <= 1.0)) FAIL("cmf out of range " << *r.cmf);
            if (r.atr_pct && !(*r.atr_pct >= 0.0)) FAIL("atr% negative " << *r.atr_pct);
            if (r.kdj_k && !(*r.kdj_k >= 0.0 && *r.kdj_k <= 100.0)) FAIL("K out of range " << *r.kdj_k);
            ++rows_checked;
        }
    }
    CHECK(rows_checked > 10000 * 35);
}

TEST_CASE("prepending 100 days leaves the common suffix unchanged") {
    std::mt19937_64 rng(5);
    const auto full = testutil::random_series(rng, 700);
    DailySeries tail{full.ticker, full.sector, {full.bars.begin() + 100, full.bars.end()}};
    const auto a = compute_indicators(full);
    const auto b = compute_indicators(tail);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto& x = a[i + 100];
        const auto& y = b[i];
        // Pure window indicators agree exactly once the window is inside the suffix.
        if (y.cci) CHECK(*x.cci == *y.cci);
        if (y.wr) CHECK(*x.wr == *y.wr);
        if (y.kdj_k) CHECK(*x.kdj_k == *y.kdj_k);
        if (y.cmf) CHECK(*x.cmf == *y.cmf);
        // Recursive ones forget their seed geometrically.
        if (i >= 400) {
            CHECK(std::abs(*x.macdh - *y.macdh) <= 1e-8);
            CHECK(std::abs(*x.rsi - *y.rsi) <= 1e-8);
            CHECK(std::abs(*x.atr_pct - *y.atr_pct) <= 1e-8);
        }
    }
}

TEST_CASE("price scaling: ratios invariant, MACDH scales") {
    std::mt19937_64 rng(8);
    const auto s = testutil::random_series(rng, 200);
    const auto base = compute_indicators(s);
    for (double k : {2.0, 0.25, 3.7}) {
        auto scaled = s;
        for (auto& b : scaled.bars) {
            b.open *= k;
            b.high *= k;
            b.low *= k;
            b.close *= k;
            b.adj_close *= k;
        }
        const auto got = compute_indicators(scaled);
        // Powers of two scale every intermediate exactly.
        const double tol = (k == 2.0 || k == 0.25) ? 0.0 : 1e-9;
        auto same = [&](const MaybeReal& x, const MaybeReal& y, double mult) {
            REQUIRE(x.has_value() == y.has_value());
            if (x) CHECK(std::abs(*x * mult - *y) <= tol * std::max(1.0, std::abs(*y)));
        };
        for (std::size_t i = 0; i < got.size(); ++i) {
            same(base[i].rsi, got[i].rsi, 1.0);
            same(base[i].wr, got[i].wr, 1.0);
            same(base[i].kdj_k, got[i].kdj_k, 1.0);
            same(base[i].cmf, got[i].cmf, 1.0);
            same(base[i].atr_pct, got[i].atr_pct, 1.0);
            same(base[i].cci, got[i].cci, 1.0);
            same(base[i].macdh, got[i].macdh, k);
        }
    }
}

TEST_CASE("fundamentals as-of join") {
    // Mon 2021-03-01 .. Fri 2021-03-05, report effective Wednesday.
    auto s = testutil::series_from_closes({100, 100, 100, 100, 100}, make_date(2021, 3, 1));
    std::vector<QuarterlyReport> reps = {
        {make_date(2021, 3, 3), 5.0, 50.0, 25.0},
        {make_date(2021, 1, 1), -1.0, 40.0, 20.0},
    };
    const auto f = compute_fundamentals(s, reps);
    REQUIRE(f.size() == 5);
    CHECK_FALSE(f[0].pe.has_value());
    CHECK(*f[0].pb == 2.5);
    CHECK(*f[0].ps == 5.0);
    CHECK(*f[1].pb == 2.5);
    CHECK(*f[2].pe == 20.0);
    CHECK(*f[2].pb == 2.0);
    CHECK(*f[4].ps == 4.0);

    const auto none = compute_fundamentals(s, std::vector<QuarterlyReport>{{make_date(2022, 1, 1), 1.0, 1.0, 1.0}});
    for (const auto& r : none) CHECK((!r.pe && !r.pb && !r.ps));

    const auto parsed = parse_reports_csv(
        "ticker,effective_date,eps_ttm,book_per_share,revenue_per_share_ttm\nAAA,2020-01-15,1.5,,3\n");
    REQUIRE(parsed.at("AAA").size() == 1);
    CHECK_FALSE(parsed.at("AAA")[0].book_per_share.has_value());
}

TEST_CASE("weekly medians over present values") {
    const Date mon = make_date(2021, 3, 1), fri = make_date(2021, 3, 5);
    std::vector<IndicatorRow> ind(3);
    std::vector<FundamentalRow> fun(3);
    const double rsi[] = {60, 40, 50};
    const MaybeReal pe[] = {10.0, std::nullopt, 14.0};
    for (int i = 0; i < 3; ++i) {
        ind[i].date = mon + std::chrono::days{i};
        ind[i].rsi = rsi[i];
        fun[i] = {mon + std::chrono::days{i}, pe[i], std::nullopt, 1.0 + i};
    }
    market::WeeklySeries w{"AAA", "Energy", {{fri, 1.0, 0.01}, {fri + std::chrono::days{7}, 1.02, 0.02}}};
    const auto rows = weekly_features(ind, fun, SentimentWeeks{{fri, 0.4}}, w);
    REQUIRE(rows.size() == 2);
    CHECK(*rows[0][Feature::rsi] == 50.0);
    CHECK(*rows[0][Feature::pe] == 12.0);
    CHECK_FALSE(rows[0][Feature::pb].has_value());
    CHECK(*rows[0][Feature::ps] == 2.0);
    CHECK(*rows[0][Feature::sentiment] == 0.4);
    CHECK(*rows[0][Feature::ret] == 0.01);
    CHECK(*rows[0].target == 0.02);
    CHECK_FALSE(rows[1][Feature::sentiment].has_value());
    CHECK_FALSE(rows[1][Feature::rsi].has_value());
    CHECK_FALSE(rows[1].target.has_value());
}

TEST_CASE("weekly medians equal a sort-based median on real data") {
    std::mt19937_64 rng(4);
    const auto s = testutil::random_series(rng, 400);
    const auto ind = compute_indicators(s);
    const auto w = market::weekly_aggregate(s);
    const auto rows = weekly_features(ind, {}, {}, w);
    for (const auto& row : rows) {
        std::vector<double> v;
        for (const auto& r : ind) {
            if (week_ending_friday(r.date) == row.week_end && r.cci) v.push_back(*r.cci);
        }
        if (v.empty()) {
            CHECK_FALSE(row[Feature::cci].has_value());
            continue;
        }
        std::sort(v.begin(), v.end());
        const double m = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        CHECK(*row[Feature::cci] == m);
    }
}

TEST_CASE("sentiment csv contract") {
    const auto m = parse_sentiment_csv("ticker,week_end,sentiment\nAAA,2021-03-05,0.5\nAAA,2021-03-10,-1\nBBB,2021-03-05,\n");
    CHECK(m.at("AAA").at(make_date(2021, 3, 5)) == 0.5);
    CHECK(m.at("AAA").at(make_date(2021, 3, 12)) == -1.0);
    CHECK_FALSE(m.contains("BBB"));
    CHECK_THROWS_WITH(parse_sentiment_csv("ticker,week_end,sentiment\nAAA,2021-03-05,1.5\n"),
                      doctest::Contains("[-1, 1]"));
    CHECK_THROWS_WITH(parse_sentiment_csv("ticker,week_end,sentiment\nAAA,2021-03-05,0.1\nAAA,2021-03-04,0.2\n"),
                      doctest::Contains("duplicate"));
    CHECK_THROWS_WITH(parse_sentiment_csv("ticker,week,sentiment\n"), doctest::Contains("week_end"));
}

TEST_CASE("feature csv round trip is exact") {
    std::mt19937_64 rng(6);
    const auto s = testutil::random_series(rng, 300);
    const auto rows = weekly_features(compute_indicators(s), {}, {}, market::weekly_aggregate(s));
    const auto text = features_csv(rows);
    const auto back = parse_features_csv(text);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].x == rows[i].x);
        CHECK(back[i].target == rows[i].target);
        CHECK(back[i].week_end == rows[i].week_end);
    }
    CHECK(features_csv(back) == text);
    CHECK(feature_from_name("kdj_k") == Feature::kdj_k);
    CHECK_FALSE(feature_from_name("kdj_d").has_value());
}

TEST_CASE("scored article records and weekly medians") {
    const std::string head = "ticker,article_id,publish_date,p_pos,p_neg,p_neutral,score\n";
    const auto recs = parse_scored_articles_csv(head +
                                                "AAA,a1,2021-03-01,0.05,0.95,0,-0.9\n"
                                                "AAA,a2,2021-03-05,0.5,0.4,0.1,0.1\n"
                                                "AAA,a3,2021-03-03,0.85,0.05,0.1,0.8\n"
                                                "AAA,a4,2021-03-08,0.6,0.2,0.2,0.4\n"
                                                "BBB,b1,2021-03-06,0.2,0.3,0.5,-0.1\n");
    REQUIRE(recs.size() == 5);
    const auto w = weekly_sentiment(recs);
    CHECK(w.at("AAA").size() == 2);
    CHECK(w.at("AAA").at(make_date(2021, 3, 5)) == doctest::Approx(0.1));
    CHECK(w.at("AAA").at(make_date(2021, 3, 12)) == doctest::Approx(0.4));
    CHECK(w.at("BBB").at(make_date(2021, 3, 12)) == doctest::Approx(-0.1));
    CHECK_FALSE(w.at("BBB").count(make_date(2021, 3, 5)));

    // order of the records within a week does not matter
    std::vector<ScoredArticle> shuffled(recs.rbegin(), recs.rend());
    CHECK(weekly_sentiment(shuffled) == w);

    // the weekly file round-trips through the sentiment contract
    CHECK(parse_sentiment_csv(sentiment_csv(w)) == w);

    CHECK_THROWS_WITH(parse_scored_articles_csv(head + "AAA,a,2021-03-01,0.5,0.6,0,-0.1\n"),
                      doctest::Contains("sum to 1"));
    CHECK_THROWS_WITH(parse_scored_articles_csv(head + "AAA,a,2021-03-01,0.5,0.2,0.3,0.1\n"),
                      doctest::Contains("p_pos - p_neg"));
    CHECK_THROWS_WITH(parse_scored_articles_csv(head + "AAA,a,2021-03-01,-0.1,0.6,0.5,-0.7\n"),
                      doctest::Contains("negative"));
    CHECK_THROWS(parse_scored_articles_csv("ticker,article_id,publish_date,p_pos,p_neg,score\n"));
}
