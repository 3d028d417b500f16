#pragma once

#include <cstddef>
#include <string_view>

#include "verbatim/embedding.hpp"

namespace verbatim {

// The five similarity scores for one (output, expected) pair.
// Character counts are Unicode scalar values, never bytes.
struct MetricReport {
    double levenshtein_normalized = 0.0;
    std::size_t lcs_chars = 0;
    std::size_t lccs_chars = 0;
    double bleu4 = 0.0;
    double cosine_sim = 0.0;
    std::size_t expected_len_chars = 0;
    std::size_t output_len_chars = 0;
};

// editdistance(output, expected) / |expected|. Throws EmptyExpected.
double levenshtein_normalized(std::string_view output, std::string_view expected);

std::size_t lcs_chars(std::string_view output, std::string_view expected);

std::size_t lccs_chars(std::string_view output, std::string_view expected);

// Word-level BLEU, n in 1..4, modified n-gram precision, geometric mean,
// brevity penalty exp(1 - r/c) for c < r. No smoothing: any zero precision
// gives 0. Orders whose candidate n-gram count is zero (candidate shorter
// than n words) are excluded from the mean, so identical short texts still
// score 1.
double bleu4_word(std::string_view output, std::string_view expected);

// Cosine of the angle between backend embeddings. Empty inputs or an
// all-zero embedding give 0.
double cosine_sim(std::string_view output, std::string_view expected,
                  const EmbeddingBackend& backend);

// All five metrics plus lengths. Throws EmptyExpected.
MetricReport evaluate_all(std::string_view output, std::string_view expected,
                          const EmbeddingBackend& backend = default_embedding_backend());

}  // namespace verbatim
