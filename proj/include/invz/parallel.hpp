#ifndef INVZ_PARALLEL_HPP
#define INVZ_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace invz {

// Runs fn(i) for i in [0, n) on up to n_workers threads. Work items own
// their rng substreams and write to per-index slots, so the result is
// identical for any worker count.
inline void parallel_for(std::int64_t n, int n_workers,
                         const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    if (n_workers <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    const int count = static_cast<int>(std::min<std::int64_t>(n_workers, n));
    threads.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace invz

#endif
