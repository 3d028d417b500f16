#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "verbatim/errors.hpp"
#include "verbatim/metrics.hpp"
#include "verbatim/unicode.hpp"
#include "verbatim/words.hpp"

using namespace verbatim;

namespace {

std::string random_words(std::mt19937_64& rng, std::size_t n_words, int vocab) {
    static const char* base[] = {"alpha", "beta",  "gamma", "delta", "omega", "sigma",
                                 "tau",   "kappa", "zeta",  "theta", "iota",  "rho"};
    std::string out;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (!out.empty()) out += ' ';
        out += base[rng() % static_cast<std::size_t>(vocab)];
    }
    return out;
}

}  // namespace

TEST_CASE("levenshtein_normalized examples") {
    CHECK(levenshtein_normalized("abc", "abc") == 0.0);
    CHECK(levenshtein_normalized("", "abc") == 1.0);
    CHECK(levenshtein_normalized("kitten", "sitting") == doctest::Approx(3.0 / 7.0).epsilon(1e-12));
    CHECK_THROWS_AS(levenshtein_normalized("abc", ""), EmptyExpected);
}

TEST_CASE("lcs_chars examples") {
    CHECK(lcs_chars("BDCABA", "ABCBDAB") == 4);
    CHECK(lcs_chars("xyz", "xyz") == 3);
    CHECK(lcs_chars("abc", "xyz") == 0);
}

TEST_CASE("lccs on the quick-brown-fox example") {
    // Longest shared run between these two is 5 characters ("rown ").
    const std::string out = "The quick brown fox jumps over the lazy dog";
    const std::string exp = "There was a crown on a dog at the fair";
    CHECK(lccs_chars(out, exp) == 5);
    CHECK(lccs_chars(out, exp) ==
          oracle::lccs_naive(uni::decode_utf8_or_throw(out), uni::decode_utf8_or_throw(exp)));
    CHECK(lccs_chars(out, out) == out.size());
}

TEST_CASE("bleu4 identity and zero cases") {
    const std::string text = "the cat sat on the mat";
    CHECK(bleu4_word(text, text) == doctest::Approx(1.0).epsilon(1e-12));
    // No shared 4-gram at all.
    CHECK(bleu4_word("alpha beta gamma delta epsilon", "one two three four five") == 0.0);
    CHECK(bleu4_word("", text) == 0.0);
}

TEST_CASE("bleu4 hand-checked value") {
    // candidate "the cat sat on the mat today" vs reference
    // "the cat sat on the mat": p1..p4 = 6/7, 5/6, 4/5, 3/4 and no brevity
    // penalty, so the score is (3/7)^(1/4).
    const double got = bleu4_word("the cat sat on the mat today", "the cat sat on the mat");
    const double expected = std::pow(3.0 / 7.0, 0.25);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    const auto cand = split_words_utf8("the cat sat on the mat today");
    const auto ref = split_words_utf8("the cat sat on the mat");
    CHECK(got == doctest::Approx(oracle::bleu4_reference(cand, ref)).epsilon(1e-12));
}

TEST_CASE("bleu4 matches the reference implementation on random pairs") {
    std::mt19937_64 rng(0xB1E00001);
    for (int iter = 0; iter < 100; ++iter) {
        const auto a = random_words(rng, 4 + rng() % 40, 6);
        const auto b = random_words(rng, 4 + rng() % 40, 6);
        const double got = bleu4_word(a, b);
        const double want = oracle::bleu4_reference(split_words_utf8(a), split_words_utf8(b));
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("bleu4 brevity penalty applies when the candidate is short") {
    // candidate = first 5 words of a 10-word reference: precisions are all
    // 1, so the score is exactly the brevity penalty exp(1 - 10/5).
    const std::string ref = "one two three four five six seven eight nine ten";
    const std::string cand = "one two three four five";
    CHECK(bleu4_word(cand, ref) == doctest::Approx(std::exp(1.0 - 2.0)).epsilon(1e-12));
}

TEST_CASE("bleu4 word segmentation lowercases and strips edge punctuation") {
    CHECK(bleu4_word("The cat, sat; on the “mat”!", "the cat sat on the mat") ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine similarity identity and disjoint cases") {
    const auto& backend = default_embedding_backend();
    CHECK(cosine_sim("alpha beta gamma", "alpha beta gamma", backend) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Fixture words chosen to land in distinct buckets.
    const std::string a = "alpha beta";
    const std::string b = "gamma delta";
    CHECK(backend.bucket(U"alpha") != backend.bucket(U"gamma"));
    CHECK(backend.bucket(U"alpha") != backend.bucket(U"delta"));
    CHECK(backend.bucket(U"beta") != backend.bucket(U"gamma"));
    CHECK(backend.bucket(U"beta") != backend.bucket(U"delta"));
    CHECK(cosine_sim(a, b, backend) == 0.0);
}

TEST_CASE("cosine matches a hand-computed five-word fixture") {
    const auto& backend = default_embedding_backend();
    // a = {alpha x2, beta}, b = {alpha, gamma}. With distinct buckets the
    // dot product is tf_a(alpha)*tf_b(alpha) = 2*1, and the norms are
    // sqrt(5) and sqrt(2).
    CHECK(backend.bucket(U"alpha") != backend.bucket(U"beta"));
    CHECK(backend.bucket(U"alpha") != backend.bucket(U"gamma"));
    CHECK(backend.bucket(U"beta") != backend.bucket(U"gamma"));
    const double got = cosine_sim("alpha alpha beta", "alpha gamma", backend);
    CHECK(got == doctest::Approx(2.0 / std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("evaluate_all identity bundle") {
    std::mt19937_64 rng(0xE7A30001);
    for (int iter = 0; iter < 20; ++iter) {
        const auto x = random_words(rng, 5 + rng() % 30, 8);
        const auto r = evaluate_all(x, x);
        CHECK(r.levenshtein_normalized == 0.0);
        CHECK(r.lcs_chars == uni::char_count(x));
        CHECK(r.lccs_chars == uni::char_count(x));
        CHECK(r.bleu4 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.cosine_sim == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.expected_len_chars == uni::char_count(x));
        CHECK(r.output_len_chars == uni::char_count(x));
    }
}

TEST_CASE("evaluate_all degenerate empty output") {
    const auto r = evaluate_all("", "some expected text here");
    CHECK(r.levenshtein_normalized == 1.0);
    CHECK(r.lcs_chars == 0);
    CHECK(r.lccs_chars == 0);
    CHECK(r.bleu4 == 0.0);
    CHECK(r.cosine_sim == 0.0);
    CHECK(r.output_len_chars == 0);
    CHECK_THROWS_AS(evaluate_all("text", ""), EmptyExpected);
}

TEST_CASE("evaluate_all equals the individual operations") {
    std::mt19937_64 rng(0xE7A30002);
    for (int iter = 0; iter < 20; ++iter) {
        const auto out = random_words(rng, 3 + rng() % 25, 6);
        const auto exp = random_words(rng, 3 + rng() % 25, 6);
        const auto r = evaluate_all(out, exp);
        CHECK(r.levenshtein_normalized == levenshtein_normalized(out, exp));
        CHECK(r.lcs_chars == lcs_chars(out, exp));
        CHECK(r.lccs_chars == lccs_chars(out, exp));
        CHECK(r.bleu4 == bleu4_word(out, exp));
        CHECK(r.cosine_sim == cosine_sim(out, exp, default_embedding_backend()));
    }
}

TEST_CASE("metric report invariants on random pairs") {
    std::mt19937_64 rng(0xE7A30003);
    for (int iter = 0; iter < 50; ++iter) {
        const auto out = random_words(rng, 1 + rng() % 30, 5);
        const auto exp = random_words(rng, 1 + rng() % 30, 5);
        const auto r = evaluate_all(out, exp);
        CHECK(r.lccs_chars <= r.lcs_chars);
        CHECK(r.lcs_chars <= std::min(r.expected_len_chars, r.output_len_chars));
        CHECK(r.bleu4 >= 0.0);
        CHECK(r.bleu4 <= 1.0);
        CHECK(r.cosine_sim >= -1.0);
        CHECK(r.cosine_sim <= 1.0 + 1e-12);
    }
}

TEST_CASE("multi-byte characters count once in reports") {
    // Byline-style French text: é must count as one character.
    const std::string exp = "café crème";  // 10 characters
    const auto r = evaluate_all(exp, exp);
    CHECK(r.expected_len_chars == 10);
    CHECK(r.lcs_chars == 10);
}
