// Deterministic fork-join helper: every index writes only its own slot, and
// results are assembled by index, so outputs never depend on the thread count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fibcone {

inline unsigned resolve_threads(unsigned max_threads) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return max_threads == 0 ? hw : std::min(max_threads, hw);
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned max_threads, Fn&& fn) {
    const unsigned nthreads = std::min<std::size_t>(resolve_threads(max_threads), count);
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace fibcone
