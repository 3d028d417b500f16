// Compiled with -mavx2; callers must gate on cpu_has_avx2().
#include "verbatim/kernels/vecops.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace verbatim::kernels {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    // One accumulator vector: lane k holds the sum of elements ≡ k mod 4,
    // matching dot_scalar's partial sums exactly. mul+add (no FMA) keeps
    // the per-lane rounding identical to the scalar kernel.
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(a + i);
        const __m256d y = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(x, y));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (; i < n; ++i) {
        lane[i & 3] += a[i] * b[i];
    }
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace verbatim::kernels

#endif
