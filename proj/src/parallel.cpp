#include "fcit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace fcit {

namespace {
std::atomic<int> g_threads{1};

int resolve(int n) {
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}
}  // namespace

void set_num_threads(int n) {
    g_threads.store(n < 0 ? 1 : n);
}

int num_threads() {
    return resolve(g_threads.load());
}

void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
    std::int64_t total = end - begin;
    if (total <= 0) return;
    int workers = std::min<std::int64_t>(num_threads(), total);
    if (workers <= 1) {
        fn(begin, end);
        return;
    }
    std::int64_t chunk = (total + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        std::int64_t lo = begin + t * chunk;
        std::int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace fcit
