#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ics {

// Runs fn(i) for i in [0, count) across up to n_threads workers. Work items
// claim indices from a shared counter; each item must write only to its own
// output slot, which keeps results independent of scheduling. The first
// exception thrown by any item is rethrown after all workers join.
template <typename Fn>
void parallel_for(int count, int n_threads, Fn&& fn) {
    if (count <= 0) return;
    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 1 || count == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    n_threads = std::min(n_threads, count);

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace ics
