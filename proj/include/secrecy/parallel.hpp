#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace secrecy {

// Runs fn(chunk_index) for chunk_index in [0, num_chunks). The chunk plan is
// fixed by the caller, so per-chunk results merged in chunk order are
// bit-identical no matter how many worker threads execute them.
inline void parallel_for_chunks(std::size_t num_chunks,
                                const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(hw ? hw : 1, num_chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < num_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t c = next.fetch_add(1);
                if (c >= num_chunks) break;
                fn(c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace secrecy
