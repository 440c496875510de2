// Deterministic work-sharing: parallel_for distributes index ranges across a
// bounded number of threads. Callers write results into per-index slots and
// reduce in index order afterwards, so output never depends on thread count.
#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace medmediate {

/// Process-wide cap on worker threads (1 = serial). Settable via CLI/env.
int max_threads();
void set_max_threads(int n);

namespace detail {
inline std::atomic<int>& thread_cap() {
    static std::atomic<int> cap{0};  // 0 = unset, resolve to hardware_concurrency
    return cap;
}
inline thread_local bool inside_parallel_region = false;

/// Marks the current thread as inside a parallel region for its lifetime,
/// restoring the previous state on exit (regions can nest).
struct RegionGuard {
    bool saved = inside_parallel_region;
    RegionGuard() { inside_parallel_region = true; }
    ~RegionGuard() { inside_parallel_region = saved; }
};
}  // namespace detail

inline int max_threads() {
    int cap = detail::thread_cap().load();
    if (cap <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        cap = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return cap;
}

inline void set_max_threads(int n) { detail::thread_cap().store(n < 1 ? 1 : n); }

/// Runs fn(i) for i in [0, n). Nested calls degrade to serial execution.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int threads = detail::inside_parallel_region
                            ? 1
                            : std::min<std::size_t>(max_threads(), n);
    if (threads <= 1) {
        detail::RegionGuard guard;
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        detail::RegionGuard guard;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads) - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace medmediate
