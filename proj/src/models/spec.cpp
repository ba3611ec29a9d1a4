#include "stackcast/models/spec.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace stackcast::models {

namespace {

using features::Feature;

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<E>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 6> kFamilies = {"arima", "linear", "random_forest", "ffnn", "lstm2", "lstm1_finetune"};
constexpr std::array<std::string_view, 3> kScopes = {"per_stock", "per_sector", "all_stock"};
constexpr std::array<std::string_view, 2> kLookbacks = {"all_past", "rolling_10y"};
constexpr std::array<std::string_view, 2> kUpdates = {"yearly", "monthly"};

}  // namespace

std::string_view to_string(Family f) { return kFamilies[static_cast<std::size_t>(f)]; }
std::string_view to_string(Scope s) { return kScopes[static_cast<std::size_t>(s)]; }
std::string_view to_string(Lookback l) { return kLookbacks[static_cast<std::size_t>(l)]; }
std::string_view to_string(Update u) { return kUpdates[static_cast<std::size_t>(u)]; }
std::optional<Family> family_from_string(std::string_view s) { return lookup<Family>(kFamilies, s); }
std::optional<Scope> scope_from_string(std::string_view s) { return lookup<Scope>(kScopes, s); }
std::optional<Lookback> lookback_from_string(std::string_view s) { return lookup<Lookback>(kLookbacks, s); }
std::optional<Update> update_from_string(std::string_view s) { return lookup<Update>(kUpdates, s); }

std::vector<Feature> default_features(Family f) {
    switch (f) {
        case Family::arima:
            return {Feature::ret};
        case Family::linear:
            return {Feature::ret, Feature::sentiment, Feature::cci, Feature::macdh,
                    Feature::rsi, Feature::kdj_k,     Feature::wr,  Feature::cmf};
        default: {
            std::vector<Feature> all;
            for (std::size_t i = 0; i < features::kFeatureCount; ++i) all.push_back(static_cast<Feature>(i));
            return all;
        }
    }
}

std::vector<ModelSpec> default_specs(std::uint64_t seed) {
    auto make = [&](std::string id, Family f, Scope s, Lookback l, Update u) {
        return ModelSpec{std::move(id), f, s, l, u, default_features(f), seed};
    };
    return {
        make("arima", Family::arima, Scope::per_stock, Lookback::all_past, Update::yearly),
        make("linear", Family::linear, Scope::all_stock, Lookback::rolling_10y, Update::yearly),
        make("rf", Family::random_forest, Scope::per_sector, Lookback::rolling_10y, Update::yearly),
        make("ffnn", Family::ffnn, Scope::all_stock, Lookback::rolling_10y, Update::monthly),
        make("lstm2", Family::lstm2, Scope::all_stock, Lookback::all_past, Update::yearly),
        make("lstm1_finetune", Family::lstm1_finetune, Scope::all_stock, Lookback::all_past, Update::yearly),
    };
}

void validate(const ModelSpec& spec) {
    const auto fail = [&](const std::string& field, const std::string& why) {
        throw std::invalid_argument("model '" + spec.id + "': " + field + ": " + why);
    };
    if (spec.id.empty()) fail("id", "must not be empty");
    auto want = default_features(spec.family);
    auto got = spec.feature_set;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (got != want) fail("feature_set", "does not match the input columns of family " + std::string(to_string(spec.family)));
    if (spec.family == Family::arima && spec.scope != Scope::per_stock) fail("scope", "arima is fitted per stock");
    if ((spec.family == Family::lstm2 || spec.family == Family::lstm1_finetune) && spec.scope != Scope::all_stock) {
        fail("scope", "recurrent models are trained on all stocks");
    }
}

std::size_t input_steps(Family f) {
    switch (f) {
        case Family::arima:
            return kArimaWindow;
        case Family::lstm2:
        case Family::lstm1_finetune:
            return kSequenceLength;
        default:
            return 1;
    }
}

}  // namespace stackcast::models
