#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stackcast/features/fundamentals.hpp"
#include "stackcast/features/weekly_features.hpp"
#include "stackcast/market_data/types.hpp"

namespace stackcast::synth {

// A latent AR(1) signal per stock is published as that week's sentiment
// score (tanh of the signal) and drives the following week's return:
//   r[w+1] = drift + scale * (weight * tanh(s[w]) + noise * e),  e ~ N(0, 1).
// Daily log prices wiggle around the weekly level with zero-mean noise, so
// the weekly average-log-price return is exactly r.
struct SynthOptions {
    std::size_t stocks = 50;
    int years = 8;
    int start_year = 2012;
    std::uint64_t seed = 7;
    double phi = 0.9;
    double weight = 0.3;
    double noise = 0.5;
    double scale = 0.04;
    double drift = 0.002;
    double sentiment_coverage = 0.9;  // share of weeks with a sentiment row
    double daily_noise = 0.01;
};

struct SynthStock {
    std::string ticker;
    std::string sector;
    market::DailySeries daily;
    std::vector<features::QuarterlyReport> reports;
    features::SentimentWeeks sentiment;
};

std::vector<SynthStock> generate(const SynthOptions& options);

// prices/<TICKER>.csv, sectors.csv, reports.csv, sentiment.csv and a
// config.json that runs the whole chain on them.
void write_synth(const std::vector<SynthStock>& stocks, const SynthOptions& options, const std::filesystem::path& dir);

// Weekly feature rows of every stock, ticker and sector filled in.
std::vector<features::WeeklyFeatureRow> feature_rows(const std::vector<SynthStock>& stocks);

std::string reports_csv(const std::vector<SynthStock>& stocks);
std::string sentiment_csv(const std::vector<SynthStock>& stocks);

}  // namespace stackcast::synth
