#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "oracles.hpp"
#include "verbatim/kernels/dispatch.hpp"
#include "verbatim/kernels/lccs.hpp"
#include "verbatim/kernels/lcs.hpp"
#include "verbatim/kernels/levenshtein.hpp"
#include "verbatim/kernels/vecops.hpp"

using namespace verbatim;

namespace {

std::u32string random_u32(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
    const std::size_t len = rng() % (max_len + 1);
    std::u32string s;
    s.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(U'a' + static_cast<char32_t>(rng() % alphabet));
    }
    return s;
}

// Every string over {a,b} of length <= max_len, by counting.
std::vector<std::u32string> all_binary_strings(std::size_t max_len) {
    std::vector<std::u32string> out;
    for (std::size_t len = 0; len <= max_len; ++len) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << len); ++bits) {
            std::u32string s(len, U'a');
            for (std::size_t i = 0; i < len; ++i) {
                if ((bits >> i) & 1) s[i] = U'b';
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("lcs kernels agree with full-table DP exhaustively over {a,b} up to length 5") {
    const auto strings = all_binary_strings(5);
    for (const auto& a : strings) {
        for (const auto& b : strings) {
            const auto expect = oracle::lcs_full_table(a, b);
            CHECK(kernels::lcs_two_row(a, b) == expect);
            CHECK(kernels::lcs_bit_parallel(a, b) == expect);
        }
    }
}

TEST_CASE("lccs rolling hash agrees with naive oracle exhaustively over {a,b} up to length 5") {
    const auto strings = all_binary_strings(5);
    for (const auto& a : strings) {
        for (const auto& b : strings) {
            CHECK(kernels::lccs_length(a, b) == oracle::lccs_naive(a, b));
        }
    }
}

TEST_CASE("randomized kernel equivalence, alphabet 4") {
    std::mt19937_64 rng(0x5EED0001);
    for (int iter = 0; iter < 400; ++iter) {
        const auto a = random_u32(rng, 120, 4);
        const auto b = random_u32(rng, 120, 4);
        const auto lcs = oracle::lcs_full_table(a, b);
        CHECK(kernels::lcs_two_row(a, b) == lcs);
        CHECK(kernels::lcs_bit_parallel(a, b) == lcs);
        CHECK(kernels::lcs_length(a, b) == lcs);
        CHECK(kernels::lccs_length(a, b) == oracle::lccs_naive(a, b));
        CHECK(kernels::levenshtein_distance(a, b) == oracle::levenshtein_full_table(a, b));
    }
}

TEST_CASE("lcs classic example") {
    CHECK(kernels::lcs_length(U"BDCABA", U"ABCBDAB") == 4);
    CHECK(kernels::lcs_length(U"", U"abc") == 0);
    CHECK(kernels::lcs_length(U"xyz", U"xyz") == 3);
    CHECK(kernels::lcs_length(U"abc", U"def") == 0);
}

TEST_CASE("levenshtein classic example and bounds") {
    CHECK(kernels::levenshtein_distance(U"kitten", U"sitting") == 3);
    CHECK(kernels::levenshtein_distance(U"", U"abc") == 3);
    CHECK(kernels::levenshtein_distance(U"abc", U"abc") == 0);
}

TEST_CASE("levenshtein triangle inequality on random triples") {
    std::mt19937_64 rng(0x5EED0002);
    for (int iter = 0; iter < 200; ++iter) {
        const auto a = random_u32(rng, 40, 6);
        const auto b = random_u32(rng, 40, 6);
        const auto c = random_u32(rng, 40, 6);
        const auto ab = kernels::levenshtein_distance(a, b);
        const auto bc = kernels::levenshtein_distance(b, c);
        const auto ac = kernels::levenshtein_distance(a, c);
        CHECK(ac <= ab + bc);
    }
}

TEST_CASE("lccs is at most lcs") {
    std::mt19937_64 rng(0x5EED0003);
    for (int iter = 0; iter < 300; ++iter) {
        const auto a = random_u32(rng, 100, 3);
        const auto b = random_u32(rng, 100, 3);
        CHECK(kernels::lccs_length(a, b) <= kernels::lcs_length(a, b));
    }
}

TEST_CASE("lcs and lccs are symmetric") {
    std::mt19937_64 rng(0x5EED0004);
    for (int iter = 0; iter < 100; ++iter) {
        const auto a = random_u32(rng, 60, 4);
        const auto b = random_u32(rng, 60, 4);
        CHECK(kernels::lcs_length(a, b) == kernels::lcs_length(b, a));
        CHECK(kernels::lccs_length(a, b) == kernels::lccs_length(b, a));
    }
}

TEST_CASE("forced scalar dispatch matches default dispatch") {
    std::mt19937_64 rng(0x5EED0005);
    for (int iter = 0; iter < 50; ++iter) {
        const auto a = random_u32(rng, 200, 4);
        const auto b = random_u32(rng, 200, 4);
        const auto fast = kernels::lcs_length(a, b);
        kernels::force_scalar_kernels(true);
        const auto scalar = kernels::lcs_length(a, b);
        kernels::force_scalar_kernels(false);
        CHECK(fast == scalar);
    }
}

TEST_CASE("dot product kernels are bit-identical") {
    std::mt19937_64 rng(0x5EED0006);
    for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 64ul, 1024ul, 1027ul}) {
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 997.0;
            b[i] = (static_cast<double>(rng() % 2000) - 1000.0) / 991.0;
        }
        const double scalar = kernels::dot_scalar(a.data(), b.data(), n);
        const double dispatched = kernels::dot(a.data(), b.data(), n);
        CHECK(scalar == dispatched);
#if defined(__x86_64__)
        if (kernels::cpu_has_avx2()) {
            CHECK(kernels::dot_avx2(a.data(), b.data(), n) == scalar);
        }
#endif
    }
}

TEST_CASE("unicode characters count once in the kernels") {
    // é as a single scalar value on both sides.
    const std::u32string a = U"café noir";
    const std::u32string b = U"café";
    CHECK(kernels::lccs_length(a, b) == 4);
    CHECK(kernels::lcs_length(a, b) == 4);
    CHECK(kernels::levenshtein_distance(a, b) == 5);
}
