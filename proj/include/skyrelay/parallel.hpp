#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace skyrelay {

/// Worker count to use when the caller passes 0.
inline unsigned default_workers()
{
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/**
 * Runs body(i) for i in [0, count) on up to `workers` threads. Tasks are
 * claimed dynamically, so callers must write results by index. The first
 * exception thrown by any task is rethrown after all threads join.
 */
template <class Body>
void parallel_for(std::uint64_t count, unsigned workers, Body&& body)
{
    if (workers == 0) {
        workers = default_workers();
    }
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(run);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace skyrelay
