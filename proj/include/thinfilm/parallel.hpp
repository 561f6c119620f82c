#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace thinfilm {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// count). Work is split into contiguous index blocks, so callers that write
/// into per-index slots get a deterministic result regardless of scheduling.
/// The first exception thrown by any worker is rethrown on the calling thread
/// once all workers have joined.
inline void parallel_for(long count, int threads, const std::function<void(long)>& body) {
    if (count <= 0)
        return;
    unsigned int want = threads > 0 ? static_cast<unsigned int>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
    want = static_cast<unsigned int>(std::min<long>(want, count));
    if (want <= 1) {
        for (long i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(want);
    const long chunk = (count + want - 1) / want;
    for (unsigned int w = 0; w < want; ++w) {
        const long begin = static_cast<long>(w) * chunk;
        const long end = std::min(count, begin + chunk);
        if (begin >= end)
            break;
        pool.emplace_back([begin, end, &body, &first_error, &error_mutex] {
            try {
                for (long i = begin; i < end; ++i)
                    body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace thinfilm
