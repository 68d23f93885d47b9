#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace ogsnet {

/// Worker count resolution: explicit request > OGSNET_WORKERS env var >
/// hardware concurrency (clamped to [1, 16]).
int resolve_workers(int requested);

/// Run fn(chunk_index) for chunk_index in [0, n_chunks) across workers.
/// Chunks are claimed from an atomic counter; callers must make each chunk's
/// work independent of claim order so results are worker-count invariant.
inline void parallel_chunks(std::int64_t n_chunks, int workers,
                            const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1 || n_chunks <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    const int nthreads = int(std::min<std::int64_t>(workers, n_chunks));
    pool.reserve(std::size_t(nthreads));
    for (int w = 0; w < nthreads; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ogsnet
