#pragma once

#include <omp.h>

namespace tdelay {

// Thread count for a kernel: `workers` if positive, else the OpenMP default.
inline int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

}  // namespace tdelay
