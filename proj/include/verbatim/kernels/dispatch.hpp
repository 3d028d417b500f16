#pragma once

namespace verbatim::kernels {

// Runtime CPU capability used to pick vector kernels.
bool cpu_has_avx2();

// Force the scalar reference kernels everywhere. Used by equivalence tests
// and the VERBATIM_FORCE_SCALAR environment variable.
void force_scalar_kernels(bool on);
bool scalar_kernels_forced();

}  // namespace verbatim::kernels
