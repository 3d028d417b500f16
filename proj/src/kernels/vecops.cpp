#include "verbatim/kernels/vecops.hpp"

#include "verbatim/kernels/dispatch.hpp"

namespace verbatim::kernels {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) {
        switch (i & 3) {
            case 0: s0 += a[i] * b[i]; break;
            case 1: s1 += a[i] * b[i]; break;
            case 2: s2 += a[i] * b[i]; break;
            default: s3 += a[i] * b[i]; break;
        }
    }
    return (s0 + s1) + (s2 + s3);
}

double dot(const double* a, const double* b, std::size_t n) {
#if defined(__x86_64__) || defined(__i386__)
    if (!scalar_kernels_forced() && cpu_has_avx2()) return dot_avx2(a, b, n);
#endif
    return dot_scalar(a, b, n);
}

}  // namespace verbatim::kernels
