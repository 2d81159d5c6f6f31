#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tokentopics {

// Work is always cut into fixed-size chunks independent of the thread count;
// callers merge per-chunk partials in chunk order, which keeps results
// bit-identical for any number of threads.
inline constexpr std::size_t kChunkSize = 2048;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kChunkSize) {
    return (n + chunk - 1) / chunk;
}

// Calls fn(chunk_index, begin, end) for every chunk of [0, n).
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn, std::size_t chunk = kChunkSize) {
    const std::size_t chunks = chunk_count(n, chunk);
    auto run = [&](std::size_t c) {
        const std::size_t begin = c * chunk;
        fn(c, begin, std::min(n, begin + chunk));
    };
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, chunks);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t c = w; c < chunks; c += workers) run(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace tokentopics
