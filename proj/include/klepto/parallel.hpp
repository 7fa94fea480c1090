#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace klepto {

inline unsigned resolve_threads(unsigned requested)
{
    if (requested != 0)
        return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs fn(worker_id, index) for every index in [0, count). Workers pull
// indices from a shared counter; fn must only touch worker-local state or
// distinct per-index slots. The first exception is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    unsigned workers = resolve_threads(threads);
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i)
            fn(0u, i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= count || failed.load())
                        return;
                    fn(w, i);
                }
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace klepto
