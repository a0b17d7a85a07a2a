#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fracenv {

/// Runs fn(i) for i in [0, n) on up to `workers` threads with a static
/// contiguous partition. Each index is visited exactly once, so results that
/// only write to slot i do not depend on the worker count.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    workers = std::clamp(workers, 1, std::max(1, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi, w] {
            try {
                for (int i = lo; i < hi; ++i)
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace fracenv
