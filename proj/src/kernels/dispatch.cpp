#include "verbatim/kernels/dispatch.hpp"

#include <atomic>
#include <cstdlib>

namespace verbatim::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

bool detect_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool env_force_scalar() {
    static const bool v = [] {
        const char* e = std::getenv("VERBATIM_FORCE_SCALAR");
        return e != nullptr && e[0] != '\0' && e[0] != '0';
    }();
    return v;
}

}  // namespace

bool cpu_has_avx2() {
    static const bool v = detect_avx2();
    return v;
}

void force_scalar_kernels(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

bool scalar_kernels_forced() {
    return g_force_scalar.load(std::memory_order_relaxed) || env_force_scalar();
}

}  // namespace verbatim::kernels
