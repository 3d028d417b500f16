#pragma once

#include <cstddef>
#include <string_view>

namespace verbatim::kernels {

// Longest common contiguous substring length in characters.
// Binary search over the answer length; each probe hashes all windows of
// one string into a flat table and slides the other string's windows over
// it. Double polynomial hash (two independent moduli); every hash match is
// verified against the raw characters before it is accepted, so collisions
// can never inflate the result.
std::size_t lccs_length(std::u32string_view a, std::u32string_view b);

}  // namespace verbatim::kernels
