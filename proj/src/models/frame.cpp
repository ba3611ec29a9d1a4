#include "stackcast/models/frame.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stackcast/common/csv.hpp"

namespace stackcast::models {

FeatureFrame select_columns(const FeatureFrame& frame, const std::vector<std::string>& wanted) {
    std::vector<std::size_t> src(wanted.size());
    for (std::size_t j = 0; j < wanted.size(); ++j) {
        std::size_t k = 0;
        while (k < frame.columns.size() && frame.columns[k] != wanted[j]) ++k;
        if (k == frame.columns.size()) throw std::invalid_argument("missing feature column '" + wanted[j] + "'");
        src[j] = k;
    }
    if (frame.X.cols() != Eigen::Index(frame.steps * frame.columns.size())) {
        throw std::invalid_argument("feature frame width does not match its columns");
    }
    FeatureFrame out;
    out.columns = wanted;
    out.steps = frame.steps;
    out.keys = frame.keys;
    out.X.resize(frame.X.rows(), Eigen::Index(frame.steps * wanted.size()));
    const std::size_t d_in = frame.columns.size(), d_out = wanted.size();
    for (std::size_t s = 0; s < frame.steps; ++s) {
        for (std::size_t j = 0; j < d_out; ++j) {
            out.X.col(Eigen::Index(s * d_out + j)) = frame.X.col(Eigen::Index(s * d_in + src[j]));
        }
    }
    return out;
}

std::string predictions_csv(const std::vector<Prediction>& preds) {
    std::ostringstream os;
    os << "ticker,week_end,model_id,value\n";
    CsvWriter w(os);
    for (const auto& p : preds) w.row({p.ticker, format_date(p.week_end), p.model_id, format_real(p.value)});
    return os.str();
}

std::vector<Prediction> parse_predictions_csv(std::string_view text, std::string source) {
    const auto t = CsvTable::parse(text, source);
    const auto ct = t.column("ticker"), cw = t.column("week_end"), cm = t.column("model_id"), cv = t.column("value");
    std::vector<Prediction> out;
    out.reserve(t.size());
    std::size_t line = 1;
    for (const auto& r : t.rows()) {
        ++line;
        Prediction p{r[ct], parse_date(r[cw]), r[cm], parse_real(r[cv])};
        if (!std::isfinite(p.value)) throw std::runtime_error(source + ":" + std::to_string(line) + ": non-finite prediction");
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path) {
    return parse_predictions_csv(read_text_file(path), path.string());
}

}  // namespace stackcast::models
