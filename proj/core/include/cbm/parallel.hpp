#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cbm {

/// Worker count used by parallel loops; 0 means "hardware concurrency".
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail {
inline thread_local bool in_worker = false;
}

/// Runs f(i) for i in [0, n) on up to thread_count() threads.
/// Each index is processed exactly once; the first exception is rethrown.
/// Calls made from inside a worker run serially.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers =
        detail::in_worker ? 1u : static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            detail::in_worker = true;
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace cbm
