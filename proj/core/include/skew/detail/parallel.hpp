#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace skew::detail {

/// Chunked parallel map over [0, n). fn(i) must be safe to call
/// concurrently for distinct i; results must be written by index so the
/// output order does not depend on scheduling. jobs = 0 picks the
/// hardware concurrency.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t workers =
        std::min<std::size_t>(n, jobs > 0 ? static_cast<std::size_t>(jobs) : hw);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([=, &fn] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace skew::detail
