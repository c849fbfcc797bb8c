#ifndef PHENOID_COMMON_PARALLEL_H_
#define PHENOID_COMMON_PARALLEL_H_

namespace phenoid {

// Selects between the OpenMP kernel and its serial reference. Both paths
// must produce bit-identical results; tests compare them.
enum class Execution { kSerial, kParallel };

int MaxThreads();

}  // namespace phenoid

#endif  // PHENOID_COMMON_PARALLEL_H_
