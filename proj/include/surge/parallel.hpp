#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace surge {

// Process-wide cap on the threads used by the OpenMP kernels. 0 = use the
// OpenMP default. The SURGE_THREADS environment variable, when set, wins.
int max_threads();
void set_max_threads(int n);

// Deterministic parallel map: fn(i) writes only to slot i of its output, so
// the result is identical for any thread count (including the serial path).
template <class Fn>
void parallel_for(int n, const Fn& fn) {
#ifdef _OPENMP
    const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt > 0 ? nt : omp_get_max_threads())
    for (int i = 0; i < n; ++i) fn(i);
#else
    for (int i = 0; i < n; ++i) fn(i);
#endif
}

// Serial reference twin of parallel_for, kept for the equivalence tests and
// the kernel benchmark.
template <class Fn>
void serial_for(int n, const Fn& fn) {
    for (int i = 0; i < n; ++i) fn(i);
}

} // namespace surge
