#include "doctest.h"

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "stackcast/common/csv.hpp"
#include "stackcast/text_linking/embedding.hpp"
#include "stackcast/text_linking/linking.hpp"
#include "stackcast/text_linking/normalize.hpp"

using namespace stackcast;
using namespace stackcast::text;

namespace {

// Memoized recursion, a different formulation from the row DP.
std::size_t lcs_oracle(const std::string& a, const std::string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::size_t r = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
        return memo[key] = r;
    };
    return go(0, 0);
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t dim = kEmbeddingDim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

EmbeddingTable letters_table(std::mt19937_64& rng) {
    EmbeddingTable t;
    for (char c = 'a'; c <= 'z'; ++c) t.add(std::string(1, c), random_vec(rng));
    return t;
}

Eigen::VectorXd vec_of(const EmbeddingTable& t, std::string_view tok) {
    return Eigen::Map<const Eigen::VectorXd>(t.resolve(tok), Eigen::Index(t.dim()));
}

}  // namespace

TEST_CASE("normalize_name examples") {
    CHECK(normalize_name("FACEBOOK, INC.") == "Facebook Inc");
    CHECK(normalize_name("Apple Incorporated") == "Apple Inc");
    CHECK(normalize_name("Intel") == "Intel");
    CHECK(normalize_name("  Microsoft   Corporation ") == "Microsoft Inc");
    CHECK(normalize_name("The Coca-Cola Company") == "The Coca Cola Inc");
    CHECK(normalize_name("Costco Wholesale Corp.") == "Costco Wholesale Inc");
    CHECK_THROWS_AS(normalize_name(" ,.; "), std::invalid_argument);
}

TEST_CASE("shipped rules file equals the built-in defaults") {
    const auto path = std::filesystem::path(STACKCAST_SOURCE_DIR) / "data" / "synonyms.rules";
    const auto rules = load_rules(path);
    REQUIRE(rules.size() == default_rules().size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        CHECK(rules[i].pattern == default_rules()[i].pattern);
        CHECK(rules[i].replacement == default_rules()[i].replacement);
    }
    const auto custom = parse_rules("# comment\n\\bintl\\b => international\n");
    CHECK(normalize_name("IBM Intl", custom) == "Ibm International");
    CHECK_THROWS_WITH(parse_rules("no arrow here"), doctest::Contains("=>"));
}

TEST_CASE("lcs_similarity examples") {
    CHECK(lcs_similarity("abc", "abc") == 1.0);
    CHECK(lcs_similarity("abc", "xyz") == 0.0);
    CHECK(lcs_similarity("Facebook Inc", "Facebook") == doctest::Approx(0.8));
    CHECK(lcs_similarity("", "abc") == 0.0);
    CHECK(lcs_similarity("", "") == 0.0);
}

TEST_CASE("lcs matches a recursive oracle on 1000 random pairs") {
    std::mt19937_64 rng(17);
    const std::string alphabet = "abcde Inc";
    for (int t = 0; t < 1000; ++t) {
        auto gen = [&] {
            std::string s(rng() % 21, ' ');
            for (auto& ch : s) ch = alphabet[rng() % alphabet.size()];
            return s;
        };
        const std::string a = gen(), b = gen();
        REQUIRE(lcs_length(a, b) == lcs_oracle(a, b));
        const double sab = lcs_similarity(a, b);
        CHECK(sab == lcs_similarity(b, a));
        if (!a.empty() && !b.empty()) {
            CHECK(sab == 2.0 * double(lcs_oracle(a, b)) / double(a.size() + b.size()));
            CHECK((sab == 1.0) == (a == b));
        }
    }
}

TEST_CASE("embedding lookup order and sqrt-n rule") {
    std::mt19937_64 rng(2);
    auto t = letters_table(rng);
    t.add("Apple", random_vec(rng));
    t.add("pie", random_vec(rng));
    const Eigen::VectorXd apple = vec_of(t, "Apple");
    CHECK(embed_phrase("Apple", t) == apple);
    CHECK(embed_phrase("APPLE", t) == apple);  // capitalized fallback
    CHECK(embed_phrase("PIE", t) == vec_of(t, "pie"));  // lowercase fallback
    CHECK((embed_phrase("Apple Apple", t) - std::sqrt(2.0) * apple).norm() <= 1e-12 * apple.norm());
}

TEST_CASE("token splitting") {
    std::mt19937_64 rng(3);
    auto t = letters_table(rng);
    CHECK(split_token("qxz", t) == std::vector<std::string>{"q", "x", "z"});
    t.add("face", random_vec(rng));
    t.add("book", random_vec(rng));
    t.add("fac", random_vec(rng));
    t.add("ebook", random_vec(rng));
    // both are two pieces; lengths 4+4 beat 3+5 on spread
    CHECK(split_token("facebook", t) == std::vector<std::string>{"face", "book"});
    CHECK(split_token("9", t).empty());

    const Eigen::VectorXd want = (vec_of(t, "q") + vec_of(t, "x") + vec_of(t, "z")) / std::sqrt(3.0);
    CHECK((embed_phrase("qxz", t) - want).norm() <= 1e-12);
    // undecomposable tokens are skipped
    CHECK((embed_phrase("qxz 42", t) - want).norm() <= 1e-12);
    CHECK(embed_phrase("42", t).norm() == 0.0);
}

TEST_CASE("split matches exhaustive search") {
    std::mt19937_64 rng(4);
    EmbeddingTable t = letters_table(rng);
    const std::vector<std::string> words = {"ab", "abc", "bca", "ca", "cab", "bc", "abca", "aab"};
    for (const auto& w : words) t.add(w, random_vec(rng));
    for (int trial = 0; trial < 300; ++trial) {
        std::string s(1 + rng() % 9, 'a');
        for (auto& ch : s) ch = "abc"[rng() % 3];
        // enumerate every cut mask
        std::pair<std::size_t, std::size_t> best{~0ull, ~0ull};
        for (std::size_t mask = 0; mask < (1ull << (s.size() - 1)); ++mask) {
            std::size_t start = 0, pieces = 0, sq = 0;
            bool ok = true;
            for (std::size_t i = 1; i <= s.size(); ++i) {
                if (i == s.size() || (mask >> (i - 1) & 1)) {
                    const auto p = s.substr(start, i - start);
                    ok = ok && t.resolve(p) != nullptr;
                    ++pieces;
                    sq += p.size() * p.size();
                    start = i;
                }
            }
            if (ok) best = std::min(best, std::make_pair(pieces, sq));
        }
        const auto got = split_token(s, t);
        std::size_t sq = 0;
        std::string joined;
        for (const auto& p : got) {
            sq += p.size() * p.size();
            joined += p;
        }
        CHECK(joined == s);
        CHECK(std::make_pair(got.size(), sq) == best);
    }
}

TEST_CASE("phrase embedding is order invariant and self-cosine is 1") {
    std::mt19937_64 rng(5);
    auto t = letters_table(rng);
    for (const char* w : {"Alpha", "Beta", "Gamma", "Delta", "Inc"}) t.add(w, random_vec(rng));
    const auto a = embed_phrase("Alpha Beta Gamma Delta Inc zz", t);
    const auto b = embed_phrase("zz Inc Delta Gamma Beta Alpha", t);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(cosine_similarity(a, a) - 1.0) <= 1e-12);
    CHECK(cosine_similarity(a, Eigen::VectorXd::Zero(128)) == 0.0);
}

TEST_CASE("embedding file parsing") {
    std::mt19937_64 rng(6);
    std::string text;
    for (char c = 'a'; c <= 'z'; ++c) {
        text += std::string(1, c);
        for (double v : random_vec(rng)) text += " " + format_real(v);
        text += "\n";
    }
    const auto t = EmbeddingTable::parse(text);
    CHECK(t.size() == 26);
    CHECK_THROWS_WITH(EmbeddingTable::parse("a 1 2 3\n"), doctest::Contains("expected 128"));
    std::string no_z = text.substr(0, text.rfind("\nz ") + 1);
    CHECK_THROWS_WITH(EmbeddingTable::parse(no_z), doctest::Contains("'z'"));
}

TEST_CASE("match_candidates") {
    std::mt19937_64 rng(7);
    auto t = letters_table(rng);
    for (const char* w : {"Facebook", "Inc", "Apple", "Social", "Media", "Banana"}) t.add(w, random_vec(rng));

    CHECK(match_candidates("FB", "Facebook Inc", std::vector<std::string>{}, t).empty());

    const std::vector<std::string> kws = {"Social Media", "Facebook Inc", "Apple Inc", "Banana", "Facebok Inc"};
    const auto got = match_candidates("FB", "Facebook Inc", kws, t, {.k = 3});
    REQUIRE(got.size() == 3);
    CHECK(got[0].keyword == "Facebook Inc");
    CHECK(got[0].lcs_score == 1.0);
    CHECK(got[0].confirmed);

    const auto all = match_candidates("FB", "Facebook Inc", kws, t, {.k = 50});
    REQUIRE(all.size() == kws.size());

    // brute-force ranking
    std::vector<std::pair<double, std::string>> ref;
    const auto nv = embed_phrase("Facebook Inc", t);
    for (const auto& k : kws) {
        ref.emplace_back(std::max(lcs_similarity("Facebook Inc", k), cosine_similarity(nv, embed_phrase(k, t))), k);
    }
    std::sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(all[i].keyword == ref[i].second);
        CHECK(all[i].score() == ref[i].first);
        if (all[i].confirmed) CHECK((all[i].lcs_score >= 0.85 || all[i].cosine_score >= 0.90));
    }
}

TEST_CASE("articles json-lines") {
    const std::string line =
        R"({"_id":"nyt://article/1","pub_date":"2020-06-11T19:16:33+0000","snippet":"Chris Cox returns.",)"
        R"("lead_paragraph":"SAN FRANCISCO - Facebook said...","headline":{"main":"Facebook Brings Back","sub":null},)"
        R"("keywords":[{"name":"subject","value":"Social Media","rank":1},{"name":"organizations","value":"Facebook Inc","rank":4}]})";
    const auto a = parse_article(line);
    CHECK(a.id == "nyt://article/1");
    CHECK(a.publish_date == make_date(2020, 6, 11));
    CHECK(a.headline == "Facebook Brings Back");
    REQUIRE(a.keywords.size() == 2);
    CHECK(a.keywords[1].rank == 4);
    CHECK(keyword_values({a}) == std::vector<std::string>{"Facebook Inc"});

    const auto b = parse_article(R"({"id":"x","publish_date":"2020-01-02","headline":"H","keywords":[]})");
    CHECK(b.headline == "H");
    CHECK_THROWS(parse_article(R"({"id":"x"})"));
    CHECK_THROWS(parse_article(R"({"id":"x","publish_date":"2020-01-02","keywords":[{"name":"a","value":"b","rank":0}]})"));
}

TEST_CASE("links csv round trip") {
    std::vector<EntityLink> links = {{"FB", "Facebook Inc", 1.0, 0.9, true}, {"FB", "Face, Book", 0.5, 0.2, false}};
    const auto back = parse_links_csv(links_csv(links));
    REQUIRE(back.size() == 2);
    CHECK(back[0].confirmed);
    CHECK(back[1].keyword == "Face, Book");
    CHECK_FALSE(back[1].confirmed);
    CHECK_THROWS_WITH(parse_links_csv("ticker,keyword,confirmed\nA,b,maybe\n"), doctest::Contains("confirmed"));
}
