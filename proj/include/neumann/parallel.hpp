#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace neumann {

// Worker count: hardware concurrency, capped by the NEUMANN_THREADS
// environment variable when set to a positive integer.
inline int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("NEUMANN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v < 1024) n = std::min(n, static_cast<int>(v));
    }
    return n;
}

inline constexpr long k_chunk_paths = 4096;

// Deterministic chunked map-reduce over [0, n): work is split into fixed-size
// chunks, each chunk's accumulator is produced independently, and the results
// are combined in chunk order — so the reduction is bitwise identical for any
// worker count.
//
//   Acc  chunk_fn(long begin, long end);
//   void combine(Acc& into, Acc&& part);   // called in chunk order
template <class Acc, class ChunkFn, class Combine>
Acc map_reduce_chunks(long n, long chunk_size, ChunkFn chunk_fn, Acc init, Combine combine) {
    if (n <= 0) return init;
    long n_chunks = (n + chunk_size - 1) / chunk_size;
    int workers = static_cast<int>(std::min<long>(worker_count(), n_chunks));
    std::vector<Acc> parts(static_cast<std::size_t>(n_chunks));
    if (workers <= 1) {
        for (long c = 0; c < n_chunks; ++c)
            parts[static_cast<std::size_t>(c)] =
                chunk_fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    } else {
        std::atomic<long> next{0};
        std::exception_ptr first_error;
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                try {
                    for (;;) {
                        long c = next.fetch_add(1);
                        if (c >= n_chunks || failed.load()) return;
                        parts[static_cast<std::size_t>(c)] =
                            chunk_fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
                    }
                } catch (...) {
                    bool expected = false;
                    if (failed.compare_exchange_strong(expected, true))
                        first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failed.load()) std::rethrow_exception(first_error);
    }
    Acc total = std::move(init);
    for (auto& p : parts) combine(total, std::move(p));
    return total;
}

}  // namespace neumann
