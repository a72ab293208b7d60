#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "cryptosim/config.hpp"
#include "cryptosim/random.hpp"
#include "cryptosim/simulation.hpp"

namespace cryptosim {

[[nodiscard]] inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Runs job(i) for i in [0, n) on up to `threads` workers. Jobs must write only
/// to their own slot. The first failure (lowest index) is rethrown after all
/// workers stop.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        job(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Seed of ensemble member k.
[[nodiscard]] inline std::uint64_t member_seed(std::uint64_t master, std::size_t k) {
    return derive_seed(master, Stream::Ensemble, k);
}

[[nodiscard]] inline MarketConfig member_config(MarketConfig cfg, std::size_t k) {
    cfg.master_seed = member_seed(cfg.master_seed, k);
    return cfg;
}

/// cfg.ensemble_size independent runs; member k is seeded from (master, k) so
/// results do not depend on scheduling.
[[nodiscard]] inline std::vector<SimOutput> run_ensemble(const MarketConfig& cfg, RunOptions options = {},
                                                         int threads = 1) {
    validate(cfg);
    const auto n = static_cast<std::size_t>(cfg.ensemble_size);
    std::vector<SimOutput> outputs(n);
    parallel_for(n, threads, [&](std::size_t k) { outputs[k] = Simulation(member_config(cfg, k), options).run(); });
    return outputs;
}

/// Like run_ensemble but reduces each run through `reduce` as soon as it ends,
/// so only the reduced values are kept in memory.
template <class Reduce>
[[nodiscard]] auto map_ensemble(const MarketConfig& cfg, RunOptions options, int threads, Reduce reduce) {
    validate(cfg);
    using Value = std::invoke_result_t<Reduce, const SimOutput&>;
    const auto n = static_cast<std::size_t>(cfg.ensemble_size);
    std::vector<Value> values(n);
    parallel_for(n, threads, [&](std::size_t k) {
        const auto out = Simulation(member_config(cfg, k), options).run();
        values[k] = reduce(out);
    });
    return values;
}

}  // namespace cryptosim
