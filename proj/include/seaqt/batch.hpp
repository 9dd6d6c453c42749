#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace seaqt {

/// Execution policy for batch work over independent items. Serial is the
/// reference implementation; Parallel fans out with OpenMP. Results must be
/// written to per-index slots so both policies produce identical output in
/// input order.
enum class ExecPolicy { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Apply fn(i) for i in [0, n). fn must only touch state owned by index i and
/// must not throw under the Parallel policy (capture failures into the item's
/// slot instead; OpenMP regions cannot propagate exceptions).
template <typename Fn>
void for_each_index(std::size_t n, ExecPolicy policy, Fn&& fn) {
  if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace seaqt
