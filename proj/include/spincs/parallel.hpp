#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace spincs {

// Runs body(i) for i in [0, n) on up to `threads` workers, striped statically.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Deterministic sum over [0, n): items are accumulated in order inside
// fixed-size blocks, then blocks are combined in a fixed binary tree.
// The result does not depend on the thread count.
template <class T, class Leaf>
T pairwise_sum(std::size_t n, std::size_t block, int threads, const T& zero, Leaf&& leaf) {
    block = std::max<std::size_t>(block, 1);
    const std::size_t n_blocks = std::max<std::size_t>((n + block - 1) / block, 1);
    std::vector<T> partial(n_blocks, zero);
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        T acc = zero;
        const std::size_t end = std::min(n, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) leaf(i, acc);
        partial[b] = std::move(acc);
    });
    while (partial.size() > 1) {
        std::vector<T> next((partial.size() + 1) / 2, zero);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = partial[2 * i];
            if (2 * i + 1 < partial.size()) next[i] += partial[2 * i + 1];
        }
        partial = std::move(next);
    }
    return partial.front();
}

} // namespace spincs
