#pragma once

#include <exception>
#include <functional>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msid {

// Runs body(0..count-1), each index independent. workers == 1 is the plain
// serial reference loop; anything else fans out with OpenMP (0 = all cores).
// Outputs must go to per-index slots, which keeps parallel and serial
// execution bit-identical.
inline void run_indexed(int count, int workers,
                        const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#ifdef _OPENMP
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic) \
    num_threads(workers > 0 ? workers : omp_get_max_threads())
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
#else
  for (int i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace msid
