#include "illumwave/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace ilw {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ILLUM_WAVE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for_slabs(int64_t n_slabs, int threads,
                        const std::function<void(int64_t)>& fn) {
    if (threads <= 1 || n_slabs <= 1) {
        for (int64_t s = 0; s < n_slabs; ++s) fn(s);
        return;
    }
    std::atomic<int64_t> next{0};
    auto worker = [&]() {
        while (true) {
            int64_t s = next.fetch_add(1);
            if (s >= n_slabs) break;
            fn(s);
        }
    };
    std::vector<std::thread> pool;
    int n = int(std::min<int64_t>(threads, n_slabs));
    pool.reserve(size_t(n - 1));
    for (int i = 0; i < n - 1; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace ilw
