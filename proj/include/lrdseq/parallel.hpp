#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lrdseq {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items must be
// independent; results should be written to preallocated slots so that
// aggregation order never depends on scheduling. Exceptions are collected
// and the first one rethrown after the join.
template <typename Fn>
void parallel_for(long n, int jobs, Fn&& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<long> cursor{0};
    const int nthreads = static_cast<int>(std::min<long>(jobs, n));
    for (int t = 0; t < nthreads; ++t) {
        threads.emplace_back([&]() {
            while (true) {
                const long i = cursor.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace lrdseq
