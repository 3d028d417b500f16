#include "verbatim/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "verbatim/errors.hpp"
#include "verbatim/kernels/lccs.hpp"
#include "verbatim/kernels/lcs.hpp"
#include "verbatim/kernels/levenshtein.hpp"
#include "verbatim/kernels/vecops.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/words.hpp"

namespace verbatim {

double levenshtein_normalized(std::string_view output, std::string_view expected) {
    if (expected.empty()) throw EmptyExpected("levenshtein_normalized: expected text is empty");
    const auto out = uni::decode_utf8_or_throw(output);
    const auto exp = uni::decode_utf8_or_throw(expected);
    const auto dist = kernels::levenshtein_distance(out, exp);
    return static_cast<double>(dist) / static_cast<double>(exp.size());
}

std::size_t lcs_chars(std::string_view output, std::string_view expected) {
    return kernels::lcs_length(uni::decode_utf8_or_throw(output),
                               uni::decode_utf8_or_throw(expected));
}

std::size_t lccs_chars(std::string_view output, std::string_view expected) {
    return kernels::lccs_length(uni::decode_utf8_or_throw(output),
                                uni::decode_utf8_or_throw(expected));
}

namespace {

struct NgramKey {
    std::array<std::uint32_t, 4> ids;
    bool operator==(const NgramKey&) const = default;
};

struct NgramKeyHash {
    std::size_t operator()(const NgramKey& k) const {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (std::uint32_t id : k.ids) {
            h ^= id;
            h *= 0x100000001B3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

std::vector<std::uint32_t> word_ids(const std::vector<std::u32string>& words,
                                    std::unordered_map<std::u32string, std::uint32_t>& dict) {
    std::vector<std::uint32_t> ids;
    ids.reserve(words.size());
    for (const auto& w : words) {
        auto [it, inserted] =
            dict.emplace(w, static_cast<std::uint32_t>(dict.size() + 1));
        ids.push_back(it->second);
    }
    return ids;
}

double bleu4_from_ids(const std::vector<std::uint32_t>& cand,
                      const std::vector<std::uint32_t>& ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    double log_sum = 0.0;
    int orders_used = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        if (cand.size() < n) break;  // no candidate n-grams at this order
        std::unordered_map<NgramKey, std::int64_t, NgramKeyHash> ref_counts;
        if (ref.size() >= n) {
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                NgramKey key{};
                for (std::size_t k = 0; k < n; ++k) key.ids[k] = ref[i + k];
                ++ref_counts[key];
            }
        }
        std::unordered_map<NgramKey, std::int64_t, NgramKeyHash> cand_counts;
        for (std::size_t i = 0; i + n <= cand.size(); ++i) {
            NgramKey key{};
            for (std::size_t k = 0; k < n; ++k) key.ids[k] = cand[i + k];
            ++cand_counts[key];
        }
        std::int64_t total = 0, clipped = 0;
        for (const auto& [key, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(key);
            if (it != ref_counts.end()) clipped += std::min(count, it->second);
        }
        if (clipped == 0) return 0.0;
        log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
        ++orders_used;
    }
    if (orders_used == 0) return 0.0;
    double bleu = std::exp(log_sum / orders_used);
    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    if (c < r) bleu *= std::exp(1.0 - r / c);
    return bleu;
}

}  // namespace

double bleu4_word(std::string_view output, std::string_view expected) {
    std::unordered_map<std::u32string, std::uint32_t> dict;
    const auto cand = word_ids(split_words_utf8(output), dict);
    const auto ref = word_ids(split_words_utf8(expected), dict);
    return bleu4_from_ids(cand, ref);
}

double cosine_sim(std::string_view output, std::string_view expected,
                  const EmbeddingBackend& backend) {
    if (output.empty() || expected.empty()) return 0.0;
    const auto a = backend.embed(output);
    const auto b = backend.embed(expected);
    if (a.size() != b.size()) {
        throw BackendUnavailable("embedding backend returned mismatched dimensions");
    }
    const double na = kernels::dot(a.data(), a.data(), a.size());
    const double nb = kernels::dot(b.data(), b.data(), b.size());
    if (na == 0.0 || nb == 0.0) return 0.0;
    // Identical vectors have cosine exactly 1; skip the rounding noise of
    // the normalization arithmetic.
    if (a == b) return 1.0;
    const double dot = kernels::dot(a.data(), b.data(), a.size());
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

MetricReport evaluate_all(std::string_view output, std::string_view expected,
                          const EmbeddingBackend& backend) {
    if (expected.empty()) throw EmptyExpected("evaluate_all: expected text is empty");
    const auto out = uni::decode_utf8_or_throw(output);
    const auto exp = uni::decode_utf8_or_throw(expected);

    MetricReport r;
    r.expected_len_chars = exp.size();
    r.output_len_chars = out.size();
    r.levenshtein_normalized = static_cast<double>(kernels::levenshtein_distance(out, exp)) /
                               static_cast<double>(exp.size());
    r.lcs_chars = kernels::lcs_length(out, exp);
    r.lccs_chars = kernels::lccs_length(out, exp);
    r.bleu4 = bleu4_word(output, expected);
    r.cosine_sim = out.empty() ? 0.0 : cosine_sim(output, expected, backend);
    return r;
}

}  // namespace verbatim
