#include "namekit/parallel.hpp"

#include <atomic>

namespace namekit {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() { return g_max_threads.load(); }

bool parallel_enabled() {
#ifdef _OPENMP
    return max_threads() != 1;
#else
    return false;
#endif
}

}  // namespace namekit
