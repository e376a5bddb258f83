#pragma once

// Deterministic fork-join over an index range. Results land in index order, so
// output never depends on scheduling; the exception from the lowest failing
// index is rethrown.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace dirac1d {

/// Worker count: hardware concurrency, capped by DIRAC1D_THREADS when set.
inline int default_thread_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("DIRAC1D_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap > 0) n = std::min(n, cap);
        } catch (...) {
        }
    }
    return n;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
    if (threads <= 0) threads = default_thread_count();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int threads, F&& fn) {
    std::vector<T> out(n);
    parallel_for(n, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

}  // namespace dirac1d
