#pragma once

#include <cstddef>
#include <string_view>

namespace verbatim::kernels {

// Longest common subsequence length in characters.
//
// Two kernels compute the same value:
//   lcs_two_row       — reference DP, two rows, O(n*m) time, O(min) memory.
//   lcs_bit_parallel  — word-parallel DP (64 cells per machine word) with
//                       multi-word carry propagation; O(n*m/64) time and
//                       linear memory for bounded alphabets.
// lcs_length selects at runtime: the bit-parallel kernel for large inputs
// whose alphabet keeps the match-mask table small, the scalar kernel
// otherwise (and always under force_scalar_kernels).
std::size_t lcs_two_row(std::u32string_view a, std::u32string_view b);
std::size_t lcs_bit_parallel(std::u32string_view a, std::u32string_view b);
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

}  // namespace verbatim::kernels
