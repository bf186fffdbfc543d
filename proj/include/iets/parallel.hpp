#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace iets {

// Parallel kernels keep a serial reference path; tests compare the two and
// the bench target times them.
enum class Exec { Serial, Parallel };

inline int hardwareWorkers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// --workers flag wins; IETS_WORKERS is the fallback; 0 keeps the default.
inline int resolveWorkers(int flagValue) {
    if (flagValue > 0) return flagValue;
    if (const char* env = std::getenv("IETS_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return hardwareWorkers();
}

inline void setWorkers(int workers) {
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

} // namespace iets
