#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace verbatim {

// Provider-native tokenization behind an interface. Proprietary tokenizers
// cannot be redistributed; the bundled implementation is a greedy
// longest-match vocabulary tokenizer that stands in for them in tests.
class Tokenizer {
  public:
    virtual ~Tokenizer() = default;

    // Byte offset just past the first n tokens. Returns text.size() when
    // the text has n tokens or fewer.
    virtual std::size_t prefix_end_bytes(std::string_view text, std::size_t n_tokens) const = 0;

    virtual const std::string& name() const = 0;
};

// Greedy longest-prefix match against a vocabulary; any character not
// covered by the vocabulary is a single-character token.
class GreedyVocabTokenizer final : public Tokenizer {
  public:
    explicit GreedyVocabTokenizer(std::vector<std::string> vocab, std::string name = "greedy-vocab");

    static std::shared_ptr<GreedyVocabTokenizer> from_file(const std::string& path);

    std::size_t prefix_end_bytes(std::string_view text, std::size_t n_tokens) const override;
    const std::string& name() const override;

  private:
    std::vector<std::string> vocab_;  // sorted by descending length
    std::size_t max_token_len_ = 1;
    std::string name_;
};

struct TokenizerSpec {
    enum class Kind { ProviderNative, CharApproximation };
    Kind kind = Kind::CharApproximation;
    unsigned chars_per_token = 4;  // CharApproximation only
    std::shared_ptr<const Tokenizer> native;  // ProviderNative only

    static TokenizerSpec char_approx(unsigned chars_per_token = 4);
    static TokenizerSpec provider_native(std::shared_ptr<const Tokenizer> tok);
};

struct PrefixSplit {
    std::string prefix;
    std::string completion;
};

// Splits text so that prefix covers the first n_tokens tokens and
// prefix + completion == text byte for byte. Character approximation takes
// n_tokens * chars_per_token Unicode characters, never splitting inside a
// multi-byte character. Throws TextTooShort when the completion would be
// empty.
PrefixSplit take_prefix(std::string_view text, std::size_t n_tokens, const TokenizerSpec& spec);

}  // namespace verbatim
