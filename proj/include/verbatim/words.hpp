#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verbatim {

// Word segmentation shared by BLEU and the term-frequency embedding:
// maximal runs of non-whitespace, lowercased, edge punctuation stripped.
// Tokens that strip to nothing are dropped.
struct WordSegmentOptions {
    bool lowercase = true;
    bool strip_edge_punct = true;
};

std::vector<std::u32string> split_words(std::u32string_view text,
                                        const WordSegmentOptions& opts = {});

std::vector<std::u32string> split_words_utf8(std::string_view text,
                                             const WordSegmentOptions& opts = {});

}  // namespace verbatim
