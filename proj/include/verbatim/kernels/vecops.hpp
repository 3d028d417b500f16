#pragma once

#include <cstddef>

namespace verbatim::kernels {

// Dot product over doubles. Both kernels accumulate four interleaved
// partial sums (lane k sums elements with index ≡ k mod 4) and reduce as
// (s0+s1)+(s2+s3), so the AVX2 variant is bit-identical to the scalar one.
double dot_scalar(const double* a, const double* b, std::size_t n);
#if defined(__x86_64__) || defined(__i386__)
double dot_avx2(const double* a, const double* b, std::size_t n);
#endif

// Runtime-dispatched entry point.
double dot(const double* a, const double* b, std::size_t n);

}  // namespace verbatim::kernels
