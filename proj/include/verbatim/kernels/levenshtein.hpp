#pragma once

#include <cstddef>
#include <string_view>

namespace verbatim::kernels {

// Unit-cost edit distance (insert/delete/substitute), character level.
// Two-row DP, O(n*m) time, O(min(n,m)) memory.
std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);

}  // namespace verbatim::kernels
