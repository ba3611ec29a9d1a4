#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stackcast/common/date.hpp"
#include "stackcast/text_linking/embedding.hpp"

namespace stackcast::text {

struct Keyword {
    std::string name;  // category, e.g. "organizations"
    std::string value;
    int rank = 1;
};

struct NewsArticle {
    std::string id;
    Date publish_date;
    std::string headline;
    std::string snippet;
    std::string lead_paragraph;
    std::vector<Keyword> keywords;
};

// One JSON object per line. Accepts the archive field names (_id, pub_date,
// headline.main) as well as id / publish_date / a plain headline string.
NewsArticle parse_article(std::string_view json_line);
std::vector<NewsArticle> read_articles(const std::filesystem::path& path);

// Distinct keyword values of the given category across articles.
std::vector<std::string> keyword_values(const std::vector<NewsArticle>& articles,
                                        std::string_view category = "organizations");

struct EntityLink {
    std::string ticker;
    std::string keyword;
    double lcs_score = 0.0;
    double cosine_score = 0.0;
    bool confirmed = false;

    double score() const { return std::max(lcs_score, cosine_score); }
};

struct MatchOptions {
    std::size_t k = 10;
    double lcs_threshold = 0.85;
    double cosine_threshold = 0.90;
};

// Top-k keywords for one ticker by max(lcs, cosine), ties by keyword. Inputs
// are expected normalized. Candidates over either threshold come pre-confirmed.
std::vector<EntityLink> match_candidates(const std::string& ticker, const std::string& ticker_name,
                                         const std::vector<std::string>& keywords, const EmbeddingTable& table,
                                         const MatchOptions& options = {});

// Same, with keyword embeddings computed once and shared across tickers.
struct KeywordIndex {
    std::vector<std::string> keywords;
    std::vector<Eigen::VectorXd> vectors;
};
KeywordIndex index_keywords(const std::vector<std::string>& keywords, const EmbeddingTable& table);
std::vector<EntityLink> match_candidates(const std::string& ticker, const std::string& ticker_name,
                                         const KeywordIndex& index, const EmbeddingTable& table,
                                         const MatchOptions& options = {});

// ticker,name
std::map<std::string, std::string> read_names_csv(const std::filesystem::path& path);

// ticker,keyword,lcs_score,cosine_score,score,confirmed
std::string candidates_csv(const std::vector<EntityLink>& links);

// ticker,keyword,confirmed
std::string links_csv(const std::vector<EntityLink>& links);
std::vector<EntityLink> parse_links_csv(std::string_view text, std::string source = "<memory>");
std::vector<EntityLink> read_links_csv(const std::filesystem::path& path);

}  // namespace stackcast::text
