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

#ifndef beamspot_tests_support_H
#define beamspot_tests_support_H

#include <beamspot/beamspot.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace testsup
{

using namespace beamspot;

// Deterministic value source for randomized property cases. Each Draw owns
// one counter stream, so a case is fully reproducible from (seed, stream).
struct Draw
{
    std::uint64_t seed;
    std::uint64_t stream;
    std::uint64_t counter = 0;

    Draw(std::uint64_t seed, std::uint64_t stream) : seed(seed), stream(stream) {}

    std::uint64_t u64() { return rng::word(seed, stream, counter++); }

    double uniform() { return rng::uniform(seed, stream, counter++); }

    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive integer range.
    long integer(long lo, long hi)
    {
        return lo + long(u64() % std::uint64_t(hi - lo + 1));
    }

    double angle() { return range(0.0, 2.0 * M_PI); }

    cdouble cnum(double radius) { return std::polar(radius * uniform(), angle()); }
};

inline double rel_gap(double a, double b)
{
    const double den = std::max(std::abs(a), std::abs(b));
    return den > 0.0 ? std::abs(a - b) / den : 0.0;
}

// Random but physically sensible scenario: arrays inside a central region,
// users well separated from every array so the far-field link model holds.
inline Scenario random_scenario(Draw &draw, std::size_t num_users, std::size_t num_arrays,
                                int antennas_per_array, double carrier_freq = 1e9)
{
    Scenario sc;
    sc.carrier = CarrierConfig{carrier_freq, speed_of_light_mps, 2.0, 1.0};
    const double lambda = wavelength(sc.carrier);
    for (std::size_t m = 0; m < num_arrays; ++m)
        sc.arrays.push_back(ArrayDescriptor{Vec2{draw.range(-100.0, 100.0),
                                                 draw.range(-100.0, 100.0)},
                                            draw.angle(), antennas_per_array, lambda / 2.0});
    for (std::size_t k = 0; k < num_users; ++k)
    {
        for (;;)
        {
            const Vec2 pos{draw.range(-250.0, 250.0), draw.range(-250.0, 250.0)};
            bool clear = true;
            for (const ArrayDescriptor &a : sc.arrays)
                clear = clear && distance(a.position, pos) > 25.0;
            if (clear)
            {
                sc.users.locations.push_back(Location{pos});
                sc.users.powers.push_back(draw.range(0.5, 1.5));
                break;
            }
        }
    }
    sc.pa.b1 = 1.0;
    sc.pa.b3 = cdouble(-0.1, 0.05);
    sc.pulse = PulseSpec{10e6, 0.22};
    return sc;
}

// Empirical cross-correlation mean(a[t+lag] conj(b[t])) of circular blocks
// at an integer lag, with a standard error from the scatter of contiguous
// sub-block means.
struct LagStat
{
    cdouble mean;
    double std_error;
};

inline LagStat circular_cross_corr(const std::vector<cdouble> &a,
                                   const std::vector<cdouble> &b, long lag,
                                   std::size_t num_chunks)
{
    const std::size_t len = a.size();
    const std::size_t chunk = len / num_chunks;
    const std::size_t shift = std::size_t((lag % long(len) + long(len)) % long(len));
    cdouble total = 0.0;
    std::vector<cdouble> means(num_chunks);
    cdouble grand = 0.0;
    for (std::size_t c = 0; c < num_chunks; ++c)
    {
        cdouble acc = 0.0;
        for (std::size_t t = c * chunk; t < (c + 1) * chunk; ++t)
            acc += a[(t + shift) % len] * std::conj(b[t]);
        means[c] = acc / double(chunk);
        grand += means[c];
        total += acc;
    }
    grand /= double(num_chunks);
    double spread = 0.0;
    for (std::size_t c = 0; c < num_chunks; ++c)
        spread += std::norm(means[c] - grand);
    LagStat out;
    out.mean = total / double(chunk * num_chunks);
    out.std_error = std::sqrt(spread / double(num_chunks - 1) / double(num_chunks));
    return out;
}

// Observer position well away from every array of the scenario.
inline Location random_observer(Draw &draw, const Scenario &sc)
{
    for (;;)
    {
        const Vec2 pos{draw.range(-250.0, 250.0), draw.range(-250.0, 250.0)};
        bool clear = true;
        for (const ArrayDescriptor &a : sc.arrays)
            clear = clear && distance(a.position, pos) > 25.0;
        if (clear)
            return Location{pos};
    }
}

}  // namespace testsup

#endif
