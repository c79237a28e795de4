#pragma once
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace apbias {

// Runs fn(chunk_index, begin, end) over [0, n) split into fixed contiguous
// chunks, one per worker. The chunk layout depends only on n and the worker
// count, never on scheduling, so callers that merge integer results (or merge
// per-chunk results in chunk order) stay deterministic. The first exception
// thrown by any chunk is rethrown on the calling thread after the join.
template <typename Fn>
void parallel_chunks(std::uint64_t n, int workers, Fn&& fn) {
    if (workers < 1) workers = 1;
    std::uint64_t w = static_cast<std::uint64_t>(workers);
    if (w > n) w = n ? n : 1;
    if (w <= 1) {
        fn(0, std::uint64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    std::mutex mtx;
    std::exception_ptr first_error;
    std::uint64_t base = n / w, extra = n % w, begin = 0;
    for (std::uint64_t i = 0; i < w; ++i) {
        std::uint64_t len = base + (i < extra ? 1 : 0);
        std::uint64_t end = begin + len;
        pool.emplace_back([&fn, &mtx, &first_error, i, begin, end] {
            try {
                fn(static_cast<int>(i), begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline int default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (hw > 8) hw = 8;
    return static_cast<int>(hw);
}

} // namespace apbias
