#include "verbatim/words.hpp"

#include "verbatim/unicode.hpp"

namespace verbatim {

std::vector<std::u32string> split_words(std::u32string_view text,
                                        const WordSegmentOptions& opts) {
    std::vector<std::u32string> words;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && uni::is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < n && !uni::is_space(text[i])) ++i;
        if (i == start) break;
        std::size_t lo = start, hi = i;
        if (opts.strip_edge_punct) {
            while (lo < hi && uni::is_edge_punct(text[lo])) ++lo;
            while (hi > lo && uni::is_edge_punct(text[hi - 1])) --hi;
        }
        if (lo == hi) continue;
        std::u32string w(text.substr(lo, hi - lo));
        if (opts.lowercase) {
            for (auto& c : w) c = uni::to_lower(c);
        }
        words.push_back(std::move(w));
    }
    return words;
}

std::vector<std::u32string> split_words_utf8(std::string_view text,
                                             const WordSegmentOptions& opts) {
    return split_words(uni::decode_utf8_or_throw(text), opts);
}

}  // namespace verbatim
