#include "qvfuse/text.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace qvfuse {

namespace {

// Classic short English stoplist (the 33-word list popularized by Lucene's
// StandardAnalyzer). The exact contents are part of the golden-test fixtures.
constexpr std::array<const char*, 33> kStopwords = {
    "a",    "an",   "and",   "are",   "as",    "at",   "be",   "but",  "by",
    "for",  "if",   "in",    "into",  "is",    "it",   "no",   "not",  "of",
    "on",   "or",   "such",  "that",  "the",   "their", "then", "there",
    "these", "they", "this",  "to",    "was",   "will", "with"};

const std::unordered_set<std::string_view>& stopword_set() {
    static const std::unordered_set<std::string_view> set(kStopwords.begin(), kStopwords.end());
    return set;
}

inline bool is_alnum_ascii(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline char to_lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

bool is_stopword(std::string_view token) {
    return stopword_set().count(token) > 0;
}

const std::vector<std::string>& stopword_list() {
    static const std::vector<std::string> list(kStopwords.begin(), kStopwords.end());
    return list;
}

std::vector<std::string> normalize(std::string_view text) {
    std::vector<std::string> terms;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) {
            return;
        }
        if (!is_stopword(token)) {
            if (token.size() > 3 && token.back() == 's') {
                token.pop_back();
            }
            terms.push_back(token);
        }
        token.clear();
    };
    for (char c : text) {
        if (is_alnum_ascii(c)) {
            token.push_back(to_lower_ascii(c));
        } else {
            flush();
        }
    }
    flush();
    return terms;
}

}  // namespace qvfuse
