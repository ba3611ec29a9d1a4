#include "doctest.h"

#include <cmath>
#include <random>

#include "stackcast/models/container.hpp"
#include "stackcast/models/fitted.hpp"

using namespace stackcast;
using namespace stackcast::models;

namespace {

// Raw frame with all twelve named columns, `steps` copies laid out oldest first.
TrainingSet make_set(std::size_t n, std::size_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0, 1);
    TrainingSet s;
    for (auto name : features::kFeatureNames) s.frame.columns.emplace_back(name);
    s.frame.steps = steps;
    const std::size_t d = s.frame.columns.size();
    s.frame.X.resize(Eigen::Index(n), Eigen::Index(steps * d));
    s.targets.resize(Eigen::Index(n), Eigen::Index(steps == 3 ? 3 : 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < steps * d; ++c) {
            // skewed, with a few missing values
            const double v = std::exp(0.5 * z(rng));
            s.frame.X(Eigen::Index(r), Eigen::Index(c)) = u(rng) < 0.03 ? NAN : v;
        }
        for (Eigen::Index k = 0; k < s.targets.cols(); ++k) {
            const double x = s.frame.X(Eigen::Index(r), Eigen::Index((steps - s.targets.cols() + k) * d + 1));
            s.targets(Eigen::Index(r), k) = 0.02 * (std::isfinite(x) ? std::log(x) : 0.0) + 0.01 * z(rng);
        }
        s.frame.keys.push_back(r % 2 ? "AAA" : "BBB");
    }
    return s;
}

TrainingSet make_arima_set(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    TrainingSet s;
    s.frame.columns = {"return"};
    s.frame.steps = kArimaWindow;
    s.frame.X = Eigen::MatrixXd::Constant(Eigen::Index(n), Eigen::Index(kArimaWindow), NAN);
    s.targets.resize(Eigen::Index(n), 1);
    double v = 0;
    std::vector<double> series;
    for (std::size_t r = 0; r < n; ++r) {
        v = 0.4 * v + 0.02 * z(rng);
        series.push_back(v);
        s.targets(Eigen::Index(r), 0) = v;
    }
    // row r sees the returns before its target
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < kArimaWindow && k < r; ++k) {
            s.frame.X(Eigen::Index(r), Eigen::Index(kArimaWindow - 1 - k)) = series[r - 1 - k];
        }
    }
    return s;
}

TrainingBudget small_budget() {
    TrainingBudget b;
    b.rf_trees = 20;
    b.max_epochs = 15;
    b.patience = 3;
    b.finetune_epochs = 3;
    return b;
}

ModelSpec spec_for(Family f) {
    for (auto s : default_specs(9)) {
        if (s.family == f) return s;
    }
    FAIL("no spec");
    return {};
}

}  // namespace

TEST_CASE("every family fits, predicts deterministically and survives the container") {
    std::vector<ModelRecord> records;
    std::vector<std::pair<FeatureFrame, Eigen::VectorXd>> expected;
    for (Family f : {Family::arima, Family::linear, Family::random_forest, Family::ffnn, Family::lstm2,
                     Family::lstm1_finetune}) {
        CAPTURE(to_string(f));
        const auto spec = spec_for(f);
        const TrainingSet train = f == Family::arima ? make_arima_set(300, 1) : make_set(600, input_steps(f), 1);
        const TrainingSet test = f == Family::arima ? make_arima_set(40, 2) : make_set(40, input_steps(f), 2);
        const auto m = fit_model(spec, train, small_budget(), 5);
        const Eigen::VectorXd a = predict(m, test.frame);
        const Eigen::VectorXd b = predict(m, test.frame);
        REQUIRE(a.size() == 40);
        CHECK(a.allFinite());
        CHECK((a.array() == b.array()).all());
        if (f != Family::arima) CHECK(m.transforms.size() == spec.feature_set.size());

        // refitting with the same seed is bit-identical
        const auto again = fit_model(spec, train, small_budget(), 5);
        CHECK((predict(again, test.frame).array() == a.array()).all());

        if (f == Family::random_forest) {
            const double lo = train.targets.minCoeff(), hi = train.targets.maxCoeff();
            CHECK(a.minCoeff() >= lo);
            CHECK(a.maxCoeff() <= hi);
        }
        records.push_back({"{\"family\":\"" + std::string(to_string(f)) + "\"}", m});
        expected.emplace_back(test.frame, a);
    }

    const auto decoded = decode_models(encode_models(records));
    REQUIRE(decoded.size() == records.size());
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        CHECK(decoded[i].manifest_json == records[i].manifest_json);
        CHECK(decoded[i].model.transforms == records[i].model.transforms);
        CHECK((predict(decoded[i].model, expected[i].first).array() == expected[i].second.array()).all());
    }
}

TEST_CASE("predict names a missing column") {
    const auto spec = spec_for(Family::linear);
    const auto m = fit_model(spec, make_set(200, 1, 3), small_budget(), 1);
    auto frame = make_set(5, 1, 4).frame;
    frame.columns[7] = "rsi_typo";
    CHECK_THROWS_WITH_AS(predict(m, frame), "missing feature column 'rsi'", std::invalid_argument);
}

TEST_CASE("fit refuses too little data and mismatched specs") {
    auto spec = spec_for(Family::ffnn);
    CHECK_THROWS_AS(fit_model(spec, make_set(100, 1, 1), small_budget(), 1), std::invalid_argument);
    spec.feature_set.pop_back();
    CHECK_THROWS_AS(fit_model(spec, make_set(600, 1, 1), small_budget(), 1), std::invalid_argument);
}

TEST_CASE("test rows are capped, training rows are not") {
    const auto spec = spec_for(Family::linear);
    auto train = make_set(300, 1, 8);
    const auto m = fit_model(spec, train, small_budget(), 1);
    FeatureFrame big = train.frame;
    big.X.conservativeResize(1, big.X.cols());
    big.X.setConstant(1e6);
    const Eigen::MatrixXd capped = transform_frame(select_columns(big, m.columns), m.transforms, true);
    const Eigen::MatrixXd raw = transform_frame(select_columns(big, m.columns), m.transforms, false);
    CHECK(capped.cwiseAbs().maxCoeff() <= 4.5);
    CHECK(raw.cwiseAbs().maxCoeff() > 4.5);
}

TEST_CASE("container rejects damage") {
    const auto m = fit_model(spec_for(Family::linear), make_set(100, 1, 2), small_budget(), 1);
    std::string bytes = encode_models({{"{}", m}});
    CHECK_THROWS(decode_models(bytes.substr(0, bytes.size() - 3)));
    CHECK_THROWS(decode_models(bytes + "x"));
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH(decode_models(bad), "model container: bad magic");
    bad = bytes;
    bad[4] = 9;
    CHECK_THROWS(decode_models(bad));
}
