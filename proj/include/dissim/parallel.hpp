// Copyright 2026 The dissim-knn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dissim {

/// 0 means "all available cores".
inline std::size_t resolve_workers(std::size_t workers) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return workers;
}

/// Runs `body(worker_id, index)` for every index in [0, n). Indices are
/// handed out in small chunks from a shared counter; callers write results
/// into per-index slots so output never depends on scheduling. `worker_id`
/// is in [0, workers) and lets callers keep per-thread scratch space.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(std::size_t{0}, i);
        }
        return;
    }

    constexpr std::size_t chunk = 16;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&](std::size_t worker) {
        try {
            while (true) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) {
                    return;
                }
                const std::size_t end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) {
                    body(worker, i);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(n);
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        pool.emplace_back(run, w);
    }
    run(0);
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace dissim
