#include "stackcast/synth/synth.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stackcast/common/csv.hpp"
#include "stackcast/common/stats.hpp"
#include "stackcast/features/pipeline.hpp"
#include "stackcast/market_data/io.hpp"

namespace stackcast::synth {

namespace {

std::string ticker_name(std::size_t i, std::size_t n) {
    std::string digits = std::to_string(i + 1);
    const std::size_t width = std::to_string(n).size();
    return "SYN" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

std::vector<SynthStock> generate(const SynthOptions& o) {
    if (o.stocks == 0 || o.years < 1) throw std::invalid_argument("synth: need at least one stock and one year");
    if (std::fabs(o.phi) >= 1.0) throw std::invalid_argument("synth: phi must lie in (-1, 1)");

    // every weekday of the span, grouped into Friday-labelled weeks
    std::vector<std::vector<Date>> weeks;
    for (Date d = make_date(o.start_year, 1, 1); d <= end_of_year(o.start_year + o.years - 1); d += std::chrono::days(1)) {
        if (!is_weekday(d)) continue;
        if (weeks.empty() || week_ending_friday(weeks.back().front()) != week_ending_friday(d)) weeks.emplace_back();
        weeks.back().push_back(d);
    }

    std::vector<SynthStock> out;
    for (std::size_t i = 0; i < o.stocks; ++i) {
        std::mt19937_64 rng(mix_seed(o.seed, i));
        std::normal_distribution<double> z;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        SynthStock s;
        s.ticker = ticker_name(i, o.stocks);
        s.sector = std::string(market::kSectors[i % market::kSectors.size()]);
        s.daily.ticker = s.ticker;
        s.daily.sector = s.sector;

        const double innovation = std::sqrt(1.0 - o.phi * o.phi);
        double signal = z(rng);
        double level = std::log(20.0 + 80.0 * u(rng));
        double prev_close = std::exp(level);
        for (std::size_t w = 0; w < weeks.size(); ++w) {
            if (w > 0) {
                level += o.drift + o.scale * (o.weight * std::tanh(signal) + o.noise * z(rng));
                signal = o.phi * signal + innovation * z(rng);
            }
            if (u(rng) < o.sentiment_coverage) s.sentiment[week_ending_friday(weeks[w].front())] = std::tanh(signal);

            std::vector<double> wiggle(weeks[w].size());
            double mean = 0.0;
            for (auto& v : wiggle) mean += (v = o.daily_noise * z(rng));
            mean /= double(wiggle.size());
            for (std::size_t k = 0; k < wiggle.size(); ++k) {
                market::DailyBar b;
                b.date = weeks[w][k];
                b.close = b.adj_close = std::exp(level + wiggle[k] - mean);
                b.open = prev_close * std::exp(0.3 * o.daily_noise * z(rng));
                b.high = std::max(b.open, b.close) * std::exp(std::fabs(0.5 * o.daily_noise * z(rng)));
                b.low = std::min(b.open, b.close) * std::exp(-std::fabs(0.5 * o.daily_noise * z(rng)));
                b.volume = std::round(1e6 * std::exp(0.3 * z(rng)));
                prev_close = b.close;
                s.daily.bars.push_back(b);
            }
        }

        // quarterly reports from a year before the prices start
        double eps = 1.0 + u(rng) * 4.0, book = 10.0 + 30.0 * u(rng), rev = 20.0 + 60.0 * u(rng);
        for (int y = o.start_year - 1; y < o.start_year + o.years; ++y) {
            for (unsigned m : {2u, 5u, 8u, 11u}) {
                eps += 0.4 * z(rng) - 0.02 * (eps - 3.0);
                book *= std::exp(0.03 * z(rng));
                rev *= std::exp(0.04 * z(rng));
                s.reports.push_back({make_date(y, m, 15), eps, book, rev});
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string reports_csv(const std::vector<SynthStock>& stocks) {
    std::ostringstream os;
    os << "ticker,effective_date,eps_ttm,book_per_share,revenue_per_share_ttm\n";
    CsvWriter w(os);
    for (const auto& s : stocks) {
        for (const auto& r : s.reports) {
            w.row({s.ticker, format_date(r.effective_date), format_real(r.eps_ttm), format_real(r.book_per_share),
                   format_real(r.revenue_per_share_ttm)});
        }
    }
    return os.str();
}

std::string sentiment_csv(const std::vector<SynthStock>& stocks) {
    std::ostringstream os;
    os << "ticker,week_end,sentiment\n";
    CsvWriter w(os);
    for (const auto& s : stocks) {
        for (const auto& [d, v] : s.sentiment) w.row({s.ticker, format_date(d), format_real(v)});
    }
    return os.str();
}

void write_synth(const std::vector<SynthStock>& stocks, const SynthOptions& o, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "prices");
    std::ostringstream sectors;
    sectors << "ticker,sector\n";
    CsvWriter sw(sectors);
    for (const auto& s : stocks) {
        write_text_file(dir / "prices" / (s.ticker + ".csv"), market::daily_csv(s.daily));
        sw.row({s.ticker, s.sector});
    }
    write_text_file(dir / "sectors.csv", sectors.str());
    write_text_file(dir / "reports.csv", reports_csv(stocks));
    write_text_file(dir / "sentiment.csv", sentiment_csv(stocks));

    nlohmann::ordered_json cfg;
    cfg["seed"] = o.seed;
    cfg["paths"] = {{"prices", "prices"}, {"sectors", "sectors.csv"}, {"reports", "reports.csv"},
                    {"sentiment", "sentiment.csv"}};
    cfg["range"] = {{"start", format_date(make_date(o.start_year, 1, 1))},
                    {"end", format_date(end_of_year(o.start_year + o.years - 1))}};
    nlohmann::ordered_json gen;
    gen["stocks"] = o.stocks;
    gen["years"] = o.years;
    gen["start_year"] = o.start_year;
    gen["phi"] = o.phi;
    gen["weight"] = o.weight;
    gen["noise"] = o.noise;
    gen["scale"] = o.scale;
    gen["drift"] = o.drift;
    cfg["synth"] = gen;
    write_text_file(dir / "config.json", cfg.dump(2) + "\n");
}

std::vector<features::WeeklyFeatureRow> feature_rows(const std::vector<SynthStock>& stocks) {
    std::vector<features::WeeklyFeatureRow> out;
    for (const auto& s : stocks) {
        auto rows = features::stock_features(s.daily, s.reports, s.sentiment);
        for (auto& r : rows) {
            r.ticker = s.ticker;
            r.sector = s.sector;
        }
        out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
    return out;
}

}  // namespace stackcast::synth
