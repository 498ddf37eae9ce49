#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chemsens {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks are claimed
// from a shared counter; callers write results by index, so output order never
// depends on scheduling. The first exception is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(body);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// Pairwise summation; the result depends only on the order of `values`.
inline double pairwise_sum(const double* values, std::size_t n)
{
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += values[i];
        }
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& values)
{
    return pairwise_sum(values.data(), values.size());
}

} // namespace chemsens
