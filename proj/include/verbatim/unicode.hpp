#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace verbatim::uni {

// Strict UTF-8 decode. Rejects overlongs, surrogates and values > U+10FFFF.
// Returns false on malformed input (out holds the prefix decoded so far).
bool decode_utf8(std::string_view bytes, std::u32string& out);

// Decode or throw verbatim::Error.
std::u32string decode_utf8_or_throw(std::string_view bytes);

std::string encode_utf8(std::u32string_view chars);

// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t char_count(std::string_view bytes);

// Byte offset of the n-th character boundary (n in [0, char_count]).
std::size_t byte_offset_of_char(std::string_view bytes, std::size_t n);

// Canonical composition of base + combining-mark pairs into precomposed
// characters. Covers the Latin ranges that occur in Western-European news
// text; it is not a full Unicode-database NFC (see README). Idempotent.
std::u32string compose_canonical(std::u32string_view in);

// compose_canonical over UTF-8 in/out.
std::string compose_canonical_utf8(std::string_view in);

// Maps typographic quotes/dashes/ellipsis to ASCII. Off by default in the
// pipeline; exists for robustness studies.
std::u32string ascii_fold(std::u32string_view in);

char32_t to_lower(char32_t c);

bool is_space(char32_t c);

// Punctuation stripped from word edges before BLEU / embedding
// segmentation. ASCII punctuation plus common typographic marks.
bool is_edge_punct(char32_t c);

}  // namespace verbatim::uni
