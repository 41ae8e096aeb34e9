#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rbergomi::detail {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// be independent; the first exception thrown by any item is rethrown on the
/// calling thread after all workers finish.
template <typename Fn>
void parallel_over(std::size_t count, int threads, std::size_t chunk, Fn&& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) return;
                const std::size_t end = std::min(begin + chunk, count);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count);  // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = static_cast<int>(std::min<std::size_t>(threads, count));
    pool.reserve(n_workers - 1);
    for (int t = 1; t < n_workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace rbergomi::detail
