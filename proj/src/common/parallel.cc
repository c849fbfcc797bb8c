#include "phenoid/common/parallel.h"

#include <omp.h>

namespace phenoid {

int MaxThreads() { return omp_get_max_threads(); }

}  // namespace phenoid
