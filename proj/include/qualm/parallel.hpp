#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qualm {

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Evaluates f(i) for i in [0, n) into a preallocated slot per index.
/// threads == 1 runs the serial reference loop; otherwise the loop is an
/// OpenMP parallel-for. Results are identical either way: every slot is a
/// pure function of its index, and callers reduce serially in index order.
template <typename T, typename F>
void parallel_map(std::size_t n, std::vector<T>& out, F&& f, int threads) {
    out.resize(n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
#endif
}

/// Serial in-order sum with Kahan compensation, so the reduced value does
/// not depend on how the map phase was scheduled.
inline double compensated_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace qualm
