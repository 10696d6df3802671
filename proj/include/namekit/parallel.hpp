#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace namekit {

// Worker cap for parallel_for. 0 leaves the OpenMP runtime default in place.
void set_max_threads(int n);
int max_threads();
bool parallel_enabled();

// Runs fn(i) for i in [0, n) with independent iterations. If several
// iterations throw, the one with the lowest index wins, so failures are
// reported identically no matter how work was scheduled. Callers that reduce
// floating-point results must fold them in index order themselves;
// parallel_for promises nothing about completion order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
#ifdef _OPENMP
    int cap = max_threads();
    if (cap != 1 && n > 1) {
        std::exception_ptr first_error = nullptr;
        std::size_t first_index = n;
        std::mutex error_mutex;
#pragma omp parallel for schedule(static) num_threads(cap > 0 ? cap : omp_get_max_threads())
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (static_cast<std::size_t>(i) < first_index) {
                    first_index = static_cast<std::size_t>(i);
                    first_error = std::current_exception();
                }
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace namekit
