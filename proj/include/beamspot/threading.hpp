// SPDX-License-Identifier: Apache-2.0
//
// beamspot   Distributed massive MIMO beamforming and PA distortion analysis
// Copyright (C) 2026 beamspot contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef beamspot_threading_H
#define beamspot_threading_H

#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace beamspot
{

// Worker count: an explicit request wins, then the BEAMSPOT_THREADS
// environment variable, then the hardware concurrency.
inline std::size_t resolve_threads(long requested)
{
    if (requested > 0)
        return std::size_t(requested);
    if (requested < 0)
        throw config_error("thread count must be positive");
    if (const char *env = std::getenv("BEAMSPOT_THREADS"))
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0)
            throw config_error("BEAMSPOT_THREADS must be a positive integer");
        return std::size_t(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Splits [begin, end) into contiguous chunks, one per worker. Each chunk
// writes to disjoint indices, so the result does not depend on the worker
// count or scheduling.
template <typename Fn>
inline void parallel_for(std::size_t begin, std::size_t end, std::size_t num_threads, Fn &&fn)
{
    const std::size_t count = end > begin ? end - begin : 0;
    if (count == 0)
        return;
    const std::size_t workers = std::min(num_threads > 0 ? num_threads : 1, count);
    if (workers == 1)
    {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([lo, hi, &fn]() { fn(lo, hi); });
    }
    for (std::thread &t : pool)
        t.join();
}

} // namespace beamspot

#endif
