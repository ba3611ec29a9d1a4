#include "stackcast/text_linking/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include "stackcast/common/csv.hpp"

namespace stackcast::text {

namespace {

constexpr std::string_view kDefaultRules =
    "\\b(corporation|incorporated|company|corp)\\b => inc\n";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += ch;
    }
    return out;
}

}  // namespace

std::vector<SynonymRule> parse_rules(std::string_view text, std::string_view source) {
    std::vector<SynonymRule> rules;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto arrow = body.find("=>");
        if (arrow == std::string_view::npos) {
            throw std::runtime_error(std::string(source) + ":" + std::to_string(lineno) + ": expected '<regex> => <replacement>'");
        }
        SynonymRule r;
        r.pattern = std::string(trim(body.substr(0, arrow)));
        r.replacement = std::string(trim(body.substr(arrow + 2)));
        try {
            r.re = std::regex(r.pattern, std::regex::ECMAScript | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw std::runtime_error(std::string(source) + ":" + std::to_string(lineno) + ": bad regex: " + e.what());
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

std::vector<SynonymRule> load_rules(const std::filesystem::path& path) {
    return parse_rules(read_text_file(path), path.string());
}

const std::vector<SynonymRule>& default_rules() {
    static const std::vector<SynonymRule> rules = parse_rules(kDefaultRules, "<default rules>");
    return rules;
}

std::string normalize_name(std::string_view raw, const std::vector<SynonymRule>& rules) {
    std::string cleaned;
    cleaned.reserve(raw.size());
    for (char ch : raw) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u) || u >= 0x80) {
            cleaned += static_cast<char>(std::tolower(u));
        } else if (std::isspace(u) || ch == '-' || ch == '_') {
            cleaned += ' ';
        }
    }
    std::string s = collapse_spaces(cleaned);
    for (const auto& r : rules) s = std::regex_replace(s, r.re, r.replacement);
    s = collapse_spaces(s);
    if (s.empty()) throw std::invalid_argument("name is empty after normalization: '" + std::string(raw) + "'");

    bool word_start = true;
    for (char& ch : s) {
        if (ch == ' ') {
            word_start = true;
        } else {
            if (word_start) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            word_start = false;
        }
    }
    return s;
}

std::size_t lcs_length(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (char ca : a) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = ca == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double lcs_similarity(std::string_view a, std::string_view b) {
    if (a.empty() || b.empty()) return 0.0;
    return 2.0 * double(lcs_length(a, b)) / double(a.size() + b.size());
}

}  // namespace stackcast::text
