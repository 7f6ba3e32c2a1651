#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace regionlab {

/// Worker cap: REGIONLAB_THREADS if set and positive, else hardware
/// concurrency. Every parallel loop in the library writes each task's
/// result to its own slot, so output never depends on this value.
inline unsigned thread_count() {
    if (const char* env = std::getenv("REGIONLAB_THREADS")) {
        const long requested = std::strtol(env, nullptr, 10);
        if (requested > 0)
            return static_cast<unsigned>(requested);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, n). Tasks must be independent; exceptions are
/// rethrown on the calling thread (first task index wins).
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers)
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& worker : pool)
        worker.join();
    for (auto& error : errors)
        if (error)
            std::rethrow_exception(error);
}

} // namespace regionlab
