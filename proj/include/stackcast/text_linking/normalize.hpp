#pragma once

#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace stackcast::text {

struct SynonymRule {
    std::string pattern;
    std::string replacement;
    std::regex re;
};

// Rules file: one "<regex> => <replacement>" per line, '#' starts a comment.
std::vector<SynonymRule> parse_rules(std::string_view text, std::string_view source = "<rules>");
std::vector<SynonymRule> load_rules(const std::filesystem::path& path);
const std::vector<SynonymRule>& default_rules();

// Lowercase, drop punctuation ('-' and '_' separate words), collapse spaces,
// apply the rules, then capitalize the first letter of every word.
// Throws std::invalid_argument when nothing is left.
std::string normalize_name(std::string_view raw, const std::vector<SynonymRule>& rules = default_rules());

// Length of the longest common subsequence, by bytes.
std::size_t lcs_length(std::string_view a, std::string_view b);

// 2 * LCS / (|a| + |b|); 0 when either side is empty.
double lcs_similarity(std::string_view a, std::string_view b);

}  // namespace stackcast::text
