#include "doctest.h"

#include <cmath>
#include <random>

#include "stackcast/metrics/metrics.hpp"

using namespace stackcast;
using namespace stackcast::metrics;

namespace {

// Straight from the definitions, one quantity per loop.
Metrics oracle(const std::vector<double>& R, const std::vector<double>& P) {
    const std::size_t n = R.size();
    Metrics m;
    m.n = n;
    std::size_t match = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if ((R[i] >= 0 && P[i] >= 0) || (R[i] < 0 && P[i] < 0)) ++match;
    }
    m.da = double(match) / double(n);

    std::size_t ups = 0, up_ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (R[i] >= 0) {
            ++ups;
            if (P[i] >= 0) ++up_ok;
        }
    }
    m.uda = ups ? double(up_ok) / double(ups) : 1.0;

    std::size_t downs = 0, down_ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(R[i] >= 0)) {
            ++downs;
            if (!(P[i] >= 0)) ++down_ok;
        }
    }
    m.dda = downs ? double(down_ok) / double(downs) : 1.0;

    double sq = 0, ab = 0;
    for (std::size_t i = 0; i < n; ++i) sq += (R[i] - P[i]) * (R[i] - P[i]);
    for (std::size_t i = 0; i < n; ++i) ab += std::fabs(R[i] - P[i]);
    m.mse = sq / double(n);
    m.rmse = std::sqrt(m.mse);
    m.mae = ab / double(n);
    return m;
}

features::WeeklyFeatureRow frow(std::string ticker, std::string sector, Date d, double x, double y) {
    features::WeeklyFeatureRow r;
    r.ticker = std::move(ticker);
    r.sector = std::move(sector);
    r.week_end = d;
    r[features::Feature::sentiment] = x;
    r.target = y;
    return r;
}

}  // namespace

TEST_CASE("metrics match the loop oracle exactly") {
    std::mt19937_64 rng(40);
    std::uniform_int_distribution<int> len(1, 60), mode(0, 5);
    std::normal_distribution<double> z(0.0, 0.03);
    int no_up = 0, no_down = 0;
    for (int t = 0; t < 1000; ++t) {
        const int n = len(rng), m = mode(rng);
        std::vector<double> R(n), P(n);
        for (int i = 0; i < n; ++i) {
            R[i] = z(rng);
            P[i] = z(rng);
            if (m == 0) R[i] = -std::fabs(R[i]) - 1e-6;  // nothing realized up
            if (m == 1) R[i] = std::fabs(R[i]);          // nothing realized down
            if (m == 2 && i % 3 == 0) R[i] = 0.0;        // zero counts as up
            if (m == 3 && i % 4 == 0) P[i] = -0.0;
        }
        const auto a = compute_metrics(R, P);
        const auto b = oracle(R, P);
        if (m == 0) ++no_up;
        if (m == 1) ++no_down;
        CHECK(a.n == b.n);
        CHECK(a.da == b.da);
        CHECK(a.uda == b.uda);
        CHECK(a.dda == b.dda);
        CHECK(a.mse == b.mse);
        CHECK(a.rmse == b.rmse);
        CHECK(a.mae == b.mae);
        CHECK(a.rmse >= a.mae);
        for (double v : {a.da, a.uda, a.dda}) CHECK((v >= 0.0 && v <= 1.0));
        if (m == 0) CHECK(a.uda == 1.0);
        if (m == 1) CHECK(a.dda == 1.0);
    }
    CHECK(no_up > 100);
    CHECK(no_down > 100);
}

TEST_CASE("metrics worked examples") {
    const std::vector<double> R{0.01, -0.02}, P{0.02, -0.01};
    const auto m = compute_metrics(R, P);
    CHECK(m.da == 1.0);
    CHECK(m.rmse == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.mae == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.mse == doctest::Approx(1e-4).epsilon(1e-12));

    const std::vector<double> X{0.3, -0.1, 0.0, 0.25};
    const auto p = compute_metrics(X, X);
    CHECK(p.da == 1.0);
    CHECK(p.uda == 1.0);
    CHECK(p.dda == 1.0);
    CHECK(p.rmse == 0.0);
    CHECK(p.mae == 0.0);

    // opposite sign everywhere, no zeros in R
    std::vector<double> Q{0.3, -0.1, 0.02, 0.25}, N;
    for (double v : Q) N.push_back(-v - 1e-9);
    CHECK(compute_metrics(Q, N).da == 0.0);

    CHECK_THROWS_AS(compute_metrics(std::vector<double>{1.0}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("aggregation scopes, pooling and partitions") {
    std::vector<Joined> rows;
    const Date y1 = make_date(2015, 1, 2), y2 = make_date(2016, 1, 1);
    // stock A: 4 of 5 right in 2015; stock B: 3 of 5 right in 2015; both all right in 2016
    for (int i = 0; i < 5; ++i) {
        const Date d = y1 + std::chrono::days{7 * i};
        rows.push_back({"m", "A", d, 0.01, i < 4 ? 0.02 : -0.02});
        rows.push_back({"m", "B", d, -0.01, i < 3 ? -0.02 : 0.02});
        rows.push_back({"m", "A", y2 + std::chrono::days{7 * i}, 0.01, 0.01});
    }
    rows.push_back({"m", "INDEX", y1, 0.01, 0.01});
    const auto recs = aggregate(rows);
    auto find = [&](std::string scope, std::string ticker, std::string period) -> const MetricsRecord& {
        for (const auto& r : recs) {
            if (r.scope == scope && r.ticker == ticker && r.period == period) return r;
        }
        FAIL("missing record " << scope << " " << ticker << " " << period);
        throw 0;
    };
    CHECK(find("stock", "A", "2015").m.da == doctest::Approx(0.8));
    CHECK(find("stock", "B", "2015").m.da == doctest::Approx(0.6));
    CHECK(find("all_stocks", "", "2015").m.da == doctest::Approx(0.7));
    CHECK(find("all_stocks", "", "2015").m.n == 10);
    CHECK(find("all_stocks", "", "full").m.n == find("all_stocks", "", "2015").m.n + find("all_stocks", "", "2016").m.n);
    CHECK(find("stock", "A", "full").m.n == 10);
    CHECK(find("stock", "A", "full").last_week == y2 + std::chrono::days{28});
    CHECK(find("index", "", "full").m.n == 1);

    // one stock one year is the direct computation on that slice
    std::vector<double> R, P;
    for (const auto& j : rows) {
        if (j.ticker == "B") {
            R.push_back(j.realized);
            P.push_back(j.predicted);
        }
    }
    const auto direct = compute_metrics(R, P);
    CHECK(find("stock", "B", "2015").m.mae == direct.mae);
    CHECK(find("stock", "B", "2015").m.uda == direct.uda);
    for (const auto& r : recs) CHECK(r.m.rmse >= r.m.mae);

    const auto csv = metrics_csv(recs);
    CHECK(csv.rfind("model_id,scope,ticker,period,last_week,n,da,uda,dda,mae,mse,rmse\nm,all_stocks,,2015,", 0) == 0);
}

TEST_CASE("join and the always-up baseline") {
    const Date d = make_date(2015, 1, 2), e = make_date(2015, 1, 9);
    const std::vector<backtest::Realized> real{{"A", d, 0.01}, {"A", e, -0.01}, {"B", d, 0.02}};
    const std::vector<models::Prediction> preds{{"A", d, "m", 0.5}, {"A", e, "m", 0.1}, {"C", d, "m", 0.3}};
    const auto j = join(preds, real);
    REQUIRE(j.size() == 2);
    CHECK(j[1].realized == -0.01);
    CHECK(join(preds, real, e).size() == 1);
    CHECK(join(preds, real, std::nullopt, d).size() == 1);
    const auto up = always_up(real, "always_up");
    REQUIRE(up.size() == 3);
    const auto m = compute_metrics(std::vector<double>{0.01, -0.01, 0.02}, std::vector<double>{0, 0, 0});
    CHECK(m.da == doctest::Approx(2.0 / 3));
    CHECK(m.uda == 1.0);
    CHECK(m.dda == 0.0);
}

TEST_CASE("threshold report against filter-and-average") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> z(0.0, 0.03);
    std::vector<Joined> rows;
    for (int i = 0; i < 2000; ++i) rows.push_back({"m", "A", make_date(2015, 1, 2), z(rng), z(rng)});
    for (double tu : {-0.01, 0.0, 0.02, 0.05}) {
        for (double td : {-0.05, -0.02, 0.0}) {
            const auto s = threshold_report(rows, tu, td);
            std::vector<const Joined*> up, down;
            for (const auto& j : rows) {
                if (j.predicted >= tu) up.push_back(&j);
                if (j.realized <= td) down.push_back(&j);
            }
            CHECK(s.n == rows.size());
            CHECK(std::fabs(s.up_frequency - double(up.size()) / rows.size()) <= 1e-12);
            CHECK(std::fabs(s.down_frequency - double(down.size()) / rows.size()) <= 1e-12);
            REQUIRE(s.up_realized_rate);
            double rate = 0, mean = 0;
            for (auto* j : up) {
                rate += j->realized >= 0;
                mean += j->realized;
            }
            CHECK(std::fabs(*s.up_realized_rate - rate / up.size()) <= 1e-12);
            CHECK(std::fabs(*s.up_mean_realized - mean / up.size()) <= 1e-12);
            REQUIRE(s.down_accuracy);
            double acc = 0, mp = 0;
            for (auto* j : down) {
                acc += (j->realized >= 0) == (j->predicted >= 0);
                mp += j->predicted;
            }
            CHECK(std::fabs(*s.down_accuracy - acc / down.size()) <= 1e-12);
            CHECK(std::fabs(*s.down_mean_predicted - mp / down.size()) <= 1e-12);
        }
    }

    // below every prediction: everything qualifies and matches the unconditional figures
    const auto all = threshold_report(rows, -1.0, 1.0);
    CHECK(all.up_frequency == 1.0);
    double ups = 0;
    for (const auto& j : rows) ups += j.realized >= 0;
    CHECK(*all.up_realized_rate == doctest::Approx(ups / rows.size()).epsilon(1e-12));
    CHECK(*all.down_accuracy == doctest::Approx(compute_metrics(
                                                    [&] {
                                                        std::vector<double> r;
                                                        for (const auto& j : rows) r.push_back(j.realized);
                                                        return r;
                                                    }(),
                                                    [&] {
                                                        std::vector<double> p;
                                                        for (const auto& j : rows) p.push_back(j.predicted);
                                                        return p;
                                                    }())
                                                    .da)
                                    .epsilon(1e-12));

    // above every prediction: nothing qualifies
    const auto none = threshold_report(rows, 1.0, -1.0);
    CHECK(none.up_frequency == 0.0);
    CHECK_FALSE(none.up_realized_rate);
    CHECK_FALSE(none.up_mean_realized);
    CHECK(none.down_frequency == 0.0);
    CHECK_FALSE(none.down_accuracy);
    CHECK_FALSE(none.down_mean_predicted);
}

TEST_CASE("slope diagnostics") {
    std::vector<features::WeeklyFeatureRow> rows;
    const Date d = make_date(2015, 1, 2);
    for (int i = 0; i < 10; ++i) rows.push_back(frow("A", "Energy", d + std::chrono::days{7 * i}, i * 0.1, 2 * i * 0.1 + 1));
    for (int i = 0; i < 10; ++i) rows.push_back(frow("B", "Energy", d + std::chrono::days{7 * i}, 0.5, i));
    rows.push_back(frow("C", "Utilities", d, 0.1, 0.2));
    rows.push_back(frow("C", "Utilities", d + std::chrono::days{7}, 0.3, 0.1));
    // a row missing x is dropped, not zero-filled
    auto gap = frow("A", "Energy", d + std::chrono::days{70}, 0, 100);
    gap[features::Feature::sentiment] = std::nullopt;
    rows.push_back(gap);

    const auto s = slope_diagnostics(rows, features::Feature::sentiment, SlopeGroup::company);
    REQUIRE(s.slopes.size() == 1);
    CHECK(s.slopes[0].group == "A");
    CHECK(s.slopes[0].slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.slopes[0].intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.slopes[0].n == 10);
    CHECK(s.skipped == std::vector<std::string>{"B", "C"});
    CHECK(s.positive == 1);
}

TEST_CASE("slope signs planted per year are recovered") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z;
    std::vector<features::WeeklyFeatureRow> rows;
    std::size_t planted_pos = 0;
    for (int y = 2000; y < 2020; ++y) {
        const double beta = (y == 2004 || y == 2013) ? -0.01 : 0.01;
        if (beta > 0) ++planted_pos;
        for (int w = 0; w < 52; ++w) {
            for (int k = 0; k < 20; ++k) {
                const double x = z(rng);
                rows.push_back(frow("S" + std::to_string(k), "Energy", make_date(y, 1, 7) + std::chrono::days{7 * w}, x,
                                    beta * x + 0.01 * z(rng)));
            }
        }
    }
    const auto s = slope_diagnostics(rows, features::Feature::sentiment, SlopeGroup::year);
    CHECK(s.slopes.size() == 20);
    CHECK(s.positive == planted_pos);
    CHECK(s.positive == 18);
    CHECK(s.negative == 2);
    const auto by_sector = slope_diagnostics(rows, features::Feature::sentiment, SlopeGroup::sector);
    REQUIRE(by_sector.slopes.size() == 1);
    CHECK(by_sector.slopes[0].n == rows.size());
}
