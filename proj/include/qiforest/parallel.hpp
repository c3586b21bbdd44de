#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace qiforest {

// Execution policy for the data-parallel kernels (per-learner training,
// per-row prediction, per-trial simulation). Exec::serial is the reference
// path; Exec::parallel adds OpenMP scheduling on top of the same per-index
// work. Outputs are bit-identical either way because each index writes its
// own slot and reductions happen serially in index order afterwards.
enum class Exec { serial, parallel };

template <typename Fn>
void parallel_for(std::size_t count, Exec exec, Fn&& fn) {
#if defined(_OPENMP)
    if (exec == Exec::parallel) {
        #pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(count); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace qiforest
