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

#ifndef beamspot_rng_H
#define beamspot_rng_H

#include <cmath>
#include <complex>
#include <cstdint>

namespace beamspot
{

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel workers can sample any index in any
// order and still produce bit-identical results.
namespace rng
{

// splitmix64 finalizer; bijective 64-bit mixer.
inline std::uint64_t mix(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
{
    return mix(mix(mix(seed) ^ (0xD1B54A32D192ED03ull * stream)) ^
               (0x8CB92BA72F3D8DD7ull * counter));
}

// Uniform in [0, 1), 53-bit resolution.
inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
{
    return double(word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Circularly-symmetric complex Gaussian, E|z|^2 = 1. Rayleigh amplitude and
// uniform phase; consumes counters 2c and 2c+1.
inline std::complex<double> cgauss(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
{
    // u1 in (0, 1] so the log is finite.
    const double u1 =
        (double(word(seed, stream, 2 * counter) >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform(seed, stream, 2 * counter + 1);
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return std::complex<double>(r * std::cos(a), r * std::sin(a));
}

} // namespace rng

} // namespace beamspot

#endif
