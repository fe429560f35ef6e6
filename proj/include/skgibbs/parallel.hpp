#ifndef SKGIBBS_PARALLEL_HPP
#define SKGIBBS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace skgibbs {

namespace detail {
inline std::atomic<int>& thread_override() {
    static std::atomic<int> value{0};
    return value;
}
}  // namespace detail

/// Overrides the worker count used by parallel_for. 0 restores the default
/// (SKGIBBS_THREADS from the environment, else hardware concurrency).
inline void set_thread_count(int n) { detail::thread_override().store(std::max(0, n)); }

inline int thread_count() {
    if (int n = detail::thread_override().load(); n > 0) return n;
    if (const char* env = std::getenv("SKGIBBS_THREADS")) {
        try {
            if (int n = std::stoi(env); n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) across worker threads. Each index is handled
/// exactly once; callers write results into slot i, so the outcome does not
/// depend on scheduling. The first exception thrown is rethrown here.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace skgibbs

#endif  // SKGIBBS_PARALLEL_HPP
