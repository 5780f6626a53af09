// Copyright 2026 The hqb Authors
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
/**
 * @file
 * A small index-parallel runner for independent trials. Each task writes its
 * own output slot, so results do not depend on scheduling.
 */
#pragma once

#include "hqb/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hqb::experiment {

inline constexpr const char *kWorkersEnv = "HQB_WORKERS";

/// Worker cap from HQB_WORKERS, else the hardware concurrency; never more
/// than `n_tasks` and never less than one.
inline std::size_t worker_count(std::size_t n_tasks) {
    std::size_t cap = std::max(1U, std::thread::hardware_concurrency());
    if (const char *env = std::getenv(kWorkersEnv); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw DomainError(std::string(kWorkersEnv) + " must be a positive integer, got '" +
                              env + "'");
        }
        cap = static_cast<std::size_t>(v);
    }
    return std::clamp<std::size_t>(cap, 1, std::max<std::size_t>(n_tasks, 1));
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads finish.
template <typename Fn> void parallel_for(std::size_t n, std::size_t workers, Fn &&fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        threads.emplace_back(body);
    }
    for (auto &t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace hqb::experiment
