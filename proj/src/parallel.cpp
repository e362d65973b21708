#include "surge/parallel.hpp"

#include <atomic>
#include <string>

namespace surge {

namespace {
std::atomic<int> g_max_threads{-1}; // -1 = not initialised yet

int read_env_cap() {
    if (const char* env = std::getenv("SURGE_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    return 0;
}
} // namespace

int max_threads() {
    int v = g_max_threads.load(std::memory_order_relaxed);
    if (v < 0) {
        v = read_env_cap();
        g_max_threads.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

} // namespace surge
