#include <atomic>
#include <thread>
#include <vector>

#include "screening/numeric.hpp"

namespace screening::runtime {

namespace {
std::atomic<int> g_threads{0};  // 0 = use hardware concurrency
}

void set_threads(int n) { g_threads.store(n > 0 ? n : 0); }

int threads() {
    const int n = g_threads.load();
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int nthreads = std::min<int>(threads(), static_cast<int>(n));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace screening::runtime
