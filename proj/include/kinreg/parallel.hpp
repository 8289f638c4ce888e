#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kinreg {

// Worker count used when a call does not pass one; 1 by default.
int default_jobs();
void set_default_jobs(int jobs);

// Runs fn(i) for i in [0, n). Indices are handed out dynamically, so fn must
// write only to slots owned by i; results are then independent of the worker
// count. The first exception thrown by any worker is rethrown.
template <typename Fn>
void parallel_for(int n, Fn&& fn, int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace kinreg
