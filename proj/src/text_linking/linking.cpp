#include "stackcast/text_linking/linking.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stackcast/common/csv.hpp"
#include "stackcast/text_linking/normalize.hpp"

namespace stackcast::text {

using nlohmann::json;

namespace {

std::string string_field(const json& j, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        auto it = j.find(n);
        if (it == j.end() || it->is_null()) continue;
        if (it->is_string()) return it->get<std::string>();
        if (it->is_object()) {
            // {"main": ..., "print_headline": ...}
            if (auto m = it->find("main"); m != it->end() && m->is_string()) return m->get<std::string>();
        }
        throw std::runtime_error(std::string("field '") + n + "' has an unexpected type");
    }
    return {};
}

bool parse_bool(std::string_view s) {
    if (s == "1" || s == "true" || s == "TRUE" || s == "True" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s == "no" || s.empty()) return false;
    throw std::runtime_error("bad boolean '" + std::string(s) + "'");
}

}  // namespace

NewsArticle parse_article(std::string_view line) {
    const json j = json::parse(line);
    if (!j.is_object()) throw std::runtime_error("article is not a JSON object");
    NewsArticle a;
    a.id = string_field(j, {"id", "_id", "web_url"});
    if (a.id.empty()) throw std::runtime_error("article without id");
    const std::string date = string_field(j, {"publish_date", "pub_date"});
    if (date.empty()) throw std::runtime_error("article " + a.id + " without publish_date");
    a.publish_date = parse_date(date);
    a.headline = string_field(j, {"headline"});
    a.snippet = string_field(j, {"snippet", "abstract"});
    a.lead_paragraph = string_field(j, {"lead_paragraph"});
    if (auto kw = j.find("keywords"); kw != j.end() && kw->is_array()) {
        for (const auto& k : *kw) {
            Keyword w{k.value("name", ""), k.value("value", ""), k.value("rank", 1)};
            if (w.rank < 1) throw std::runtime_error("article " + a.id + ": keyword rank < 1");
            a.keywords.push_back(std::move(w));
        }
    }
    return a;
}

std::vector<NewsArticle> read_articles(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    std::vector<NewsArticle> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_article(line));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<std::string> keyword_values(const std::vector<NewsArticle>& articles, std::string_view category) {
    std::set<std::string> seen;
    for (const auto& a : articles) {
        for (const auto& k : a.keywords) {
            if (k.name == category && !k.value.empty()) seen.insert(k.value);
        }
    }
    return {seen.begin(), seen.end()};
}

KeywordIndex index_keywords(const std::vector<std::string>& keywords, const EmbeddingTable& table) {
    KeywordIndex idx;
    std::set<std::string> uniq(keywords.begin(), keywords.end());
    for (const auto& k : uniq) {
        idx.keywords.push_back(k);
        idx.vectors.push_back(embed_phrase(k, table));
    }
    return idx;
}

std::vector<EntityLink> match_candidates(const std::string& ticker, const std::string& ticker_name,
                                         const KeywordIndex& index, const EmbeddingTable& table,
                                         const MatchOptions& options) {
    const Eigen::VectorXd name_vec = embed_phrase(ticker_name, table);
    std::vector<EntityLink> all;
    all.reserve(index.keywords.size());
    for (std::size_t i = 0; i < index.keywords.size(); ++i) {
        EntityLink l{ticker, index.keywords[i], lcs_similarity(ticker_name, index.keywords[i]),
                     cosine_similarity(name_vec, index.vectors[i]), false};
        l.confirmed = l.lcs_score >= options.lcs_threshold || l.cosine_score >= options.cosine_threshold;
        all.push_back(std::move(l));
    }
    const std::size_t k = std::min(options.k, all.size());
    std::partial_sort(all.begin(), all.begin() + std::ptrdiff_t(k), all.end(), [](const auto& a, const auto& b) {
        if (a.score() != b.score()) return a.score() > b.score();
        return a.keyword < b.keyword;
    });
    all.resize(k);
    return all;
}

std::vector<EntityLink> match_candidates(const std::string& ticker, const std::string& ticker_name,
                                         const std::vector<std::string>& keywords, const EmbeddingTable& table,
                                         const MatchOptions& options) {
    if (keywords.empty()) return {};
    return match_candidates(ticker, ticker_name, index_keywords(keywords, table), table, options);
}

std::map<std::string, std::string> read_names_csv(const std::filesystem::path& path) {
    const auto t = CsvTable::read(path);
    const auto ct = t.column("ticker"), cn = t.column("name");
    std::map<std::string, std::string> out;
    for (const auto& r : t.rows()) out[r[ct]] = r[cn];
    return out;
}

std::string candidates_csv(const std::vector<EntityLink>& links) {
    std::ostringstream os;
    os << "ticker,keyword,lcs_score,cosine_score,score,confirmed\n";
    CsvWriter w(os);
    for (const auto& l : links) {
        w.row({l.ticker, l.keyword, format_real(l.lcs_score), format_real(l.cosine_score), format_real(l.score()),
               l.confirmed ? "1" : "0"});
    }
    return os.str();
}

std::string links_csv(const std::vector<EntityLink>& links) {
    std::ostringstream os;
    os << "ticker,keyword,confirmed\n";
    CsvWriter w(os);
    for (const auto& l : links) w.row({l.ticker, l.keyword, l.confirmed ? "1" : "0"});
    return os.str();
}

std::vector<EntityLink> parse_links_csv(std::string_view text, std::string source) {
    const auto t = CsvTable::parse(text, source);
    const auto ct = t.column("ticker"), ck = t.column("keyword"), cc = t.column("confirmed");
    std::vector<EntityLink> out;
    std::size_t line = 1;
    for (const auto& r : t.rows()) {
        ++line;
        EntityLink l;
        l.ticker = r[ct];
        l.keyword = r[ck];
        try {
            l.confirmed = parse_bool(r[cc]);
        } catch (const std::exception& e) {
            throw std::runtime_error(source + ":" + std::to_string(line) + ": confirmed: " + e.what());
        }
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<EntityLink> read_links_csv(const std::filesystem::path& path) {
    return parse_links_csv(read_text_file(path), path.string());
}

}  // namespace stackcast::text
