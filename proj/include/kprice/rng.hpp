#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace kprice {

// One independent generator per shard, derived from (seed, shard index).
// Identical streams for a fixed pair on every platform.
inline std::mt19937_64 make_shard_rng(unsigned long long seed, int shard) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    return std::mt19937_64(seq);
}

// Uniform draw in [0, 1) built from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline const char* rng_description() { return "mt19937_64/seed_seq(seed,shard)"; }

// Runs work(0..shards-1) on up to `threads` workers (0 = hardware count).
// Shard results must be stored by index so merges stay order-independent.
inline void parallel_shards(int shards, int threads, const std::function<void(int)>& work) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, shards);
    if (threads == 1) {
        for (int s = 0; s < shards; ++s) work(s);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int s = next.fetch_add(1); s < shards; s = next.fetch_add(1)) work(s);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace kprice
