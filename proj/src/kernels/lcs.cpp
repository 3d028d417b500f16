#include "verbatim/kernels/lcs.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "verbatim/kernels/dispatch.hpp"

namespace verbatim::kernels {

std::size_t lcs_two_row(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    // Keep the row over the shorter string.
    if (b.size() > a.size()) std::swap(a, b);
    const std::size_t m = b.size();
    std::vector<std::uint32_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const char32_t ai = a[i];
        for (std::size_t j = 0; j < m; ++j) {
            cur[j + 1] = (ai == b[j]) ? prev[j] + 1 : std::max(prev[j + 1], cur[j]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

namespace {

// Match masks for the bit-laid string: one bit row per distinct character.
// Slot 0 stays all-zero for characters of the other string that never occur.
struct MatchMasks {
    std::vector<std::uint64_t> bits;  // (alphabet+1) x words
    std::unordered_map<char32_t, std::uint32_t> index;
    std::size_t words = 0;

    bool build(std::u32string_view s, std::size_t memory_cap_bytes) {
        words = (s.size() + 63) / 64;
        index.reserve(256);
        std::uint32_t next = 1;
        for (char32_t c : s) {
            auto [it, inserted] = index.emplace(c, next);
            if (inserted) ++next;
        }
        const std::size_t total = std::size_t(next) * words;
        if (total * sizeof(std::uint64_t) > memory_cap_bytes) return false;
        bits.assign(total, 0);
        for (std::size_t j = 0; j < s.size(); ++j) {
            const std::uint32_t idx = index.at(s[j]);
            bits[std::size_t(idx) * words + (j >> 6)] |= std::uint64_t(1) << (j & 63);
        }
        return true;
    }

    const std::uint64_t* row(char32_t c) const {
        auto it = index.find(c);
        const std::uint32_t idx = it == index.end() ? 0 : it->second;
        return bits.data() + std::size_t(idx) * words;
    }
};

constexpr std::size_t kMaskMemoryCap = std::size_t(256) << 20;

}  // namespace

std::size_t lcs_bit_parallel(std::u32string_view a, std::u32string_view b) {
    if (a.empty() || b.empty()) return 0;
    // Lay the shorter string across bits so the inner loop walks fewer words.
    if (b.size() > a.size()) std::swap(a, b);
    MatchMasks masks;
    if (!masks.build(b, kMaskMemoryCap)) return lcs_two_row(a, b);
    const std::size_t words = masks.words;
    const std::size_t m = b.size();

    // Row state: a 0 bit marks a column where the LCS length steps up.
    std::vector<std::uint64_t> v(words, ~std::uint64_t(0));
    for (char32_t c : a) {
        const std::uint64_t* match = masks.row(c);
        std::uint64_t carry = 0;   // carry of v + u
        std::uint64_t borrow = 0;  // borrow of v - u
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t vw = v[w];
            const std::uint64_t u = vw & match[w];
            const std::uint64_t sum0 = vw + u;
            std::uint64_t c1 = sum0 < vw;
            const std::uint64_t sum = sum0 + carry;
            c1 |= sum < sum0;
            const std::uint64_t dif0 = vw - u;
            std::uint64_t b1 = vw < u;
            const std::uint64_t dif = dif0 - borrow;
            b1 |= dif0 < borrow;
            v[w] = sum | dif;
            carry = c1;
            borrow = b1;
        }
    }

    std::size_t ones = 0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t word = v[w];
        if (w == words - 1 && (m & 63) != 0) {
            word &= (std::uint64_t(1) << (m & 63)) - 1;
        }
        ones += std::size_t(std::popcount(word));
    }
    return m - ones;
}

std::size_t lcs_length(std::u32string_view a, std::u32string_view b) {
    if (scalar_kernels_forced()) return lcs_two_row(a, b);
    // The word-parallel kernel wins once strings stop being tiny.
    if (a.size() < 64 || b.size() < 64) return lcs_two_row(a, b);
    return lcs_bit_parallel(a, b);
}

}  // namespace verbatim::kernels
