#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace stackcast::text {

inline constexpr std::size_t kEmbeddingDim = 128;

class EmbeddingTable {
public:
    explicit EmbeddingTable(std::size_t dim = kEmbeddingDim) : dim_(dim) {}

    // Text format: "token v1 ... v<dim>" per line. Throws on a wrong field
    // count, a duplicate token, or when a single letter a..z is absent.
    static EmbeddingTable parse(std::string_view text, std::string_view source = "<embeddings>",
                                std::size_t dim = kEmbeddingDim);
    static EmbeddingTable load(const std::filesystem::path& path, std::size_t dim = kEmbeddingDim);

    void add(std::string token, std::span<const double> vec);
    // Exact lookup, nullptr when absent.
    const double* find(std::string_view token) const;
    // Original form, then Capitalized, then lowercase.
    const double* resolve(std::string_view token) const;

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }
    void require_letters() const;

private:
    std::size_t dim_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> data_;
};

// Split of an unresolvable token into resolvable pieces: fewest pieces first,
// then the smallest spread of piece lengths. Empty when no split exists.
std::vector<std::string> split_token(std::string_view token, const EmbeddingTable& table);

// Sum of token vectors divided by sqrt(token count). Tokens are whitespace
// separated; an unresolvable token contributes its pieces, each counted as a
// token. Tokens with no split at all are skipped. Zero vector if nothing resolves.
Eigen::VectorXd embed_phrase(std::string_view phrase, const EmbeddingTable& table);

// 0 when either vector is zero.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace stackcast::text
