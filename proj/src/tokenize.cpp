#include "verbatim/tokenize.hpp"

#include <algorithm>
#include <fstream>

#include "verbatim/errors.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/util.hpp"

namespace verbatim {

GreedyVocabTokenizer::GreedyVocabTokenizer(std::vector<std::string> vocab, std::string name)
    : vocab_(std::move(vocab)), name_(std::move(name)) {
    std::sort(vocab_.begin(), vocab_.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
    for (const auto& t : vocab_) max_token_len_ = std::max(max_token_len_, t.size());
}

std::shared_ptr<GreedyVocabTokenizer> GreedyVocabTokenizer::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) vocab.push_back(line);
    }
    return std::make_shared<GreedyVocabTokenizer>(std::move(vocab), "greedy-vocab:" + path);
}

std::size_t GreedyVocabTokenizer::prefix_end_bytes(std::string_view text,
                                                   std::size_t n_tokens) const {
    std::size_t pos = 0;
    std::size_t tokens = 0;
    while (pos < text.size() && tokens < n_tokens) {
        std::size_t advance = 0;
        for (const auto& tok : vocab_) {
            if (tok.size() <= text.size() - pos && text.compare(pos, tok.size(), tok) == 0) {
                advance = tok.size();
                break;
            }
        }
        if (advance == 0) {
            // Single-character fallback, multi-byte aware.
            advance = 1;
            while (pos + advance < text.size() &&
                   (static_cast<unsigned char>(text[pos + advance]) & 0xC0) == 0x80) {
                ++advance;
            }
        }
        pos += advance;
        ++tokens;
    }
    return pos;
}

const std::string& GreedyVocabTokenizer::name() const { return name_; }

TokenizerSpec TokenizerSpec::char_approx(unsigned chars_per_token) {
    if (chars_per_token < 1) throw ConfigError("chars_per_token must be >= 1");
    TokenizerSpec s;
    s.kind = Kind::CharApproximation;
    s.chars_per_token = chars_per_token;
    return s;
}

TokenizerSpec TokenizerSpec::provider_native(std::shared_ptr<const Tokenizer> tok) {
    if (!tok) throw ConfigError("provider-native tokenizer must be non-null");
    TokenizerSpec s;
    s.kind = Kind::ProviderNative;
    s.native = std::move(tok);
    return s;
}

PrefixSplit take_prefix(std::string_view text, std::size_t n_tokens, const TokenizerSpec& spec) {
    if (text.empty()) throw Error("take_prefix: text is empty");
    if (n_tokens < 1) throw Error("take_prefix: n_tokens must be >= 1");

    std::size_t split_bytes;
    if (spec.kind == TokenizerSpec::Kind::CharApproximation) {
        const std::size_t want_chars = n_tokens * spec.chars_per_token;
        const std::size_t total_chars = uni::char_count(text);
        if (want_chars >= total_chars) {
            throw TextTooShort("text of " + std::to_string(total_chars) +
                               " characters cannot supply a " + std::to_string(n_tokens) +
                               "-token prefix and a non-empty completion");
        }
        split_bytes = uni::byte_offset_of_char(text, want_chars);
    } else {
        split_bytes = spec.native->prefix_end_bytes(text, n_tokens);
        if (split_bytes >= text.size()) {
            throw TextTooShort("text has no more than " + std::to_string(n_tokens) +
                               " tokens; completion would be empty");
        }
    }
    return PrefixSplit{std::string(text.substr(0, split_bytes)),
                       std::string(text.substr(split_bytes))};
}

}  // namespace verbatim
