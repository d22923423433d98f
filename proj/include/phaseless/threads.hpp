#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace phaseless {

namespace detail {
inline std::atomic<int> g_max_threads{1};
}

/// Worker cap shared by all enumeration sweeps. 1 = serial (default).
inline int max_threads() { return detail::g_max_threads.load(); }
inline void set_max_threads(int n) { detail::g_max_threads.store(n < 1 ? 1 : n); }

/// Runs fn(i) for i in [0, n). Each index writes only its own slot of any
/// output container, so results are identical for every thread count.
template <typename Fn>
void parallel_for_index(std::uint64_t n, Fn&& fn) {
    const int threads = max_threads();
    if (threads <= 1 || n < 2048) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::uint64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t lo = chunk * w;
        const std::uint64_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &fn] {
            for (std::uint64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace phaseless
