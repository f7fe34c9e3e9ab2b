#pragma once

// Worker-count control and an exception-safe OpenMP loop.

#include <cstddef>
#include <exception>
#include <mutex>

namespace htp {

/// Sets the number of OpenMP workers; 0 restores the default, which is the
/// HTP_WORKERS environment variable when set and the OpenMP default otherwise.
void set_worker_count(int n);
int worker_count();

/// Runs body(i) for i in [0, n) across the workers. Results must be written to
/// per-index slots so the outcome does not depend on scheduling. The first
/// exception thrown by any iteration is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex guard;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (long i = 0; i < count; ++i) {
    {
      std::lock_guard lock(guard);
      if (error) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace htp
