#include "posecast/parallel.hpp"

#include <cstdlib>
#include <string>

namespace posecast::par {

void apply_thread_cap() {
#if defined(_OPENMP)
  const char* env = std::getenv("POSECAST_THREADS");
  if (env == nullptr || *env == '\0') return;
  int cap = 0;
  try {
    cap = std::stoi(env);
  } catch (...) {
    return;  // unparseable cap: keep runtime default
  }
  if (cap < 1) return;
  if (cap < omp_get_max_threads()) omp_set_num_threads(cap);
#endif
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace posecast::par
