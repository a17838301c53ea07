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

#ifndef beamspot_precoder_H
#define beamspot_precoder_H

#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "signals.hpp"

namespace beamspot
{

// Served users: positions plus linear power scalings p^(k).
struct UserSet
{
    std::vector<Location> locations;
    std::vector<double> powers;

    std::size_t count() const { return locations.size(); }
};

inline void validate(const UserSet &users)
{
    if (users.locations.empty())
        throw config_error("at least one user is required");
    if (users.powers.size() != users.locations.size())
        throw config_error("user powers and locations differ in length");
    for (double p : users.powers)
        if (!(p > 0.0))
            throw config_error("user powers must be > 0");
}

// Propagation parameters for every (array, user) pair, stored row-major by
// array index.
class LinkTable
{
  public:
    LinkTable() = default;
    LinkTable(std::size_t num_arrays, std::size_t num_users)
        : M(num_arrays), K(num_users), data(num_arrays * num_users)
    {
    }

    LinkParams &at(std::size_t m, std::size_t k) { return data[m * K + k]; }
    const LinkParams &at(std::size_t m, std::size_t k) const { return data[m * K + k]; }

    // Links of every array toward one user, in array order.
    std::vector<LinkParams> toward_user(std::size_t k) const
    {
        std::vector<LinkParams> out(M);
        for (std::size_t m = 0; m < M; ++m)
            out[m] = at(m, k);
        return out;
    }

    std::size_t num_arrays() const { return M; }
    std::size_t num_users() const { return K; }

  private:
    std::size_t M = 0, K = 0;
    std::vector<LinkParams> data;
};

inline LinkTable build_links(const std::vector<ArrayDescriptor> &arrays, const UserSet &users,
                             const CarrierConfig &carrier)
{
    LinkTable links(arrays.size(), users.count());
    for (std::size_t m = 0; m < arrays.size(); ++m)
        for (std::size_t k = 0; k < users.count(); ++k)
            links.at(m, k) = compute_link(arrays[m], users.locations[k], carrier);
    return links;
}

// Matched-filter weight for antenna n of array m serving user k: a time
// advance tau_m^(k) and the phase e^{j(phi_m^(k) n + psi_m^(k))}. The
// weights mirror the user's link parameters so that, through the channel,
// every antenna contribution arrives at the user with zero phase and zero
// net delay.
struct MfWeight
{
    double advance = 0.0;  // seconds, applied as s(t + advance)
    double psi = 0.0;      // radians
    double phi = 0.0;      // radians per antenna index
};

class MfWeights
{
  public:
    MfWeights() = default;
    explicit MfWeights(const LinkTable &links)
        : M(links.num_arrays()), K(links.num_users()), data(M * K)
    {
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k)
            {
                const LinkParams &lp = links.at(m, k);
                data[m * K + k] = MfWeight{lp.tau, lp.psi, lp.phi};
            }
    }

    const MfWeight &at(std::size_t m, std::size_t k) const { return data[m * K + k]; }
    cdouble phase(std::size_t m, std::size_t n, std::size_t k) const
    {
        const MfWeight &w = at(m, k);
        return std::polar(1.0, w.phi * double(n) + w.psi);
    }

    std::size_t num_arrays() const { return M; }
    std::size_t num_users() const { return K; }

  private:
    std::size_t M = 0, K = 0;
    std::vector<MfWeight> data;
};

inline MfWeights mf_weights(const LinkTable &links) { return MfWeights(links); }

// Power fed into each amplifier, identical at every antenna of every
// array: sigma_x^2 = sum_k p^(k) R(0).
inline double pa_input_power(const UserSet &users, const CorrelationGrid &corr)
{
    validate(users);
    double acc = 0.0;
    for (double p : users.powers)
        acc += p;
    return acc * corr.at_zero().real();
}

// Cross-correlation between the amplifier inputs of antenna n of array m
// and antenna n' of array m':
//   R(tau) = sum_k p^(k) e^{j(phi_m^(k) n - phi_m'^(k) n' + psi_m^(k) - psi_m'^(k))}
//            R(tau + tau_m^(k) - tau_m'^(k)).
inline CorrelationGrid input_cross_correlation(std::size_t m, std::size_t n, std::size_t m2,
                                               std::size_t n2, const UserSet &users,
                                               const LinkTable &links,
                                               const CorrelationGrid &corr)
{
    validate(users);
    CorrelationGrid out;
    out.lag_step = corr.lag_step;
    out.values.assign(corr.num_points(), 0.0);
    for (std::size_t k = 0; k < users.count(); ++k)
    {
        const LinkParams &a = links.at(m, k);
        const LinkParams &b = links.at(m2, k);
        const cdouble rot = std::polar(users.powers[k], a.phi * double(n) - b.phi * double(n2) +
                                                            a.psi - b.psi);
        const CorrelationGrid shifted = shift_correlation(corr, a.tau - b.tau);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += rot * shifted.values[i];
    }
    return out;
}

} // namespace beamspot

#endif
