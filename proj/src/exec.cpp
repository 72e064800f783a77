#include "agora/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agora {

namespace {
Exec g_default = Exec::Serial;
}

Exec default_exec() { return g_default; }
void set_default_exec(Exec e) { g_default = e; }

int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace agora
