#include "htp/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace htp {
namespace {

std::atomic<int> configured{0};

int from_environment() {
  if (const char* env = std::getenv("HTP_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

}  // namespace

void set_worker_count(int n) { configured = n > 0 ? n : 0; }

int worker_count() {
  const int n = configured.load();
  return n > 0 ? n : from_environment();
}

}  // namespace htp
