#include "stackcast/text_linking/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stackcast/common/csv.hpp"
#include "stackcast/common/log.hpp"

namespace stackcast::text {

namespace {

std::string capitalized(std::string_view s) {
    std::string out(s);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto u = static_cast<unsigned char>(out[i]);
        out[i] = static_cast<char>(i == 0 ? std::toupper(u) : std::tolower(u));
    }
    return out;
}

std::string lowered(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

}  // namespace

void EmbeddingTable::add(std::string token, std::span<const double> vec) {
    if (vec.size() != dim_) {
        throw std::invalid_argument("embedding for '" + token + "' has " + std::to_string(vec.size()) +
                                    " values, expected " + std::to_string(dim_));
    }
    const std::size_t idx = index_.size();
    if (!index_.emplace(token, idx).second) throw std::invalid_argument("duplicate embedding token '" + token + "'");
    data_.insert(data_.end(), vec.begin(), vec.end());
}

const double* EmbeddingTable::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
}

const double* EmbeddingTable::resolve(std::string_view token) const {
    if (const double* v = find(token)) return v;
    if (const double* v = find(capitalized(token))) return v;
    return find(lowered(token));
}

void EmbeddingTable::require_letters() const {
    for (char c = 'a'; c <= 'z'; ++c) {
        if (!resolve(std::string(1, c))) {
            throw std::runtime_error(std::string("embedding table lacks the single letter '") + c + "'");
        }
    }
}

EmbeddingTable EmbeddingTable::parse(std::string_view text, std::string_view source, std::size_t dim) {
    EmbeddingTable t(dim);
    std::vector<double> vec;
    std::size_t pos = 0, lineno = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

        const auto where = [&] { return std::string(source) + ":" + std::to_string(lineno) + ": "; };
        std::size_t i = line.find_first_not_of(" \t");
        std::size_t j = line.find_first_of(" \t", i);
        if (j == std::string_view::npos) throw std::runtime_error(where() + "token without vector");
        std::string token(line.substr(i, j - i));
        vec.clear();
        i = j;
        while (true) {
            i = line.find_first_not_of(" \t", i);
            if (i == std::string_view::npos) break;
            j = line.find_first_of(" \t", i);
            if (j == std::string_view::npos) j = line.size();
            double v = 0.0;
            const auto [p, ec] = std::from_chars(line.data() + i, line.data() + j, v);
            if (ec != std::errc{} || p != line.data() + j) {
                throw std::runtime_error(where() + "bad number '" + std::string(line.substr(i, j - i)) + "'");
            }
            vec.push_back(v);
            i = j;
        }
        try {
            t.add(std::move(token), vec);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where() + e.what());
        }
    }
    t.require_letters();
    return t;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, std::size_t dim) {
    return parse(read_text_file(path), path.string(), dim);
}

std::vector<std::string> split_token(std::string_view token, const EmbeddingTable& table) {
    const std::size_t n = token.size();
    constexpr auto kInf = std::numeric_limits<std::size_t>::max();
    // best[i]: (pieces, sum of squared lengths) for token[0, i)
    std::vector<std::pair<std::size_t, std::size_t>> best(n + 1, {kInf, kInf});
    std::vector<std::size_t> cut(n + 1, 0);
    best[0] = {0, 0};
    for (std::size_t i = 1; i <= n; ++i) {
        // Longer last pieces first, so ties keep the earliest found.
        for (std::size_t k = 0; k < i; ++k) {
            if (best[k].first == kInf) continue;
            if (!table.resolve(token.substr(k, i - k))) continue;
            const std::size_t len = i - k;
            const std::pair<std::size_t, std::size_t> cand{best[k].first + 1, best[k].second + len * len};
            if (cand < best[i]) {
                best[i] = cand;
                cut[i] = k;
            }
        }
    }
    if (best[n].first == kInf) return {};
    std::vector<std::string> pieces;
    for (std::size_t i = n; i > 0; i = cut[i]) pieces.emplace_back(token.substr(cut[i], i - cut[i]));
    std::reverse(pieces.begin(), pieces.end());
    return pieces;
}

Eigen::VectorXd embed_phrase(std::string_view phrase, const EmbeddingTable& table) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(Eigen::Index(table.dim()));
    std::size_t count = 0;
    const auto add = [&](const double* v) {
        sum += Eigen::Map<const Eigen::VectorXd>(v, Eigen::Index(table.dim()));
        ++count;
    };
    std::size_t i = 0;
    while (i < phrase.size()) {
        i = phrase.find_first_not_of(" \t\r\n", i);
        if (i == std::string_view::npos) break;
        std::size_t j = phrase.find_first_of(" \t\r\n", i);
        if (j == std::string_view::npos) j = phrase.size();
        const auto token = phrase.substr(i, j - i);
        i = j;
        if (const double* v = table.resolve(token)) {
            add(v);
            continue;
        }
        const auto pieces = split_token(token, table);
        if (pieces.empty()) {
            log::debug("embedding: no split for token '" + std::string(token) + "'");
            continue;
        }
        for (const auto& p : pieces) add(table.resolve(p));
    }
    if (count > 0) sum /= std::sqrt(double(count));
    return sum;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

}  // namespace stackcast::text
