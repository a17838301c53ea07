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

#ifndef beamspot_geometry_H
#define beamspot_geometry_H

#include <cmath>
#include <optional>
#include <string>

#include "errors.hpp"

namespace beamspot
{

constexpr double speed_of_light_mps = 299792458.0;

struct Vec2
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2 &a, const Vec2 &b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Uniform linear array in the cell plane. position is the reference antenna
// (index n = 0); axis_angle is the direction of the antenna line.
struct ArrayDescriptor
{
    Vec2 position;
    double axis_angle = 0.0;  // radians
    int num_antennas = 1;     // N_m >= 1
    double spacing = 0.0;     // meters, > 0
};

// A UE or observer position.
struct Location
{
    Vec2 position;
};

struct CarrierConfig
{
    double carrier_freq = 0.0;        // Hz
    double speed_of_light = speed_of_light_mps;
    double path_loss_exponent = 2.0;  // applied to power
    double ref_distance = 1.0;        // meters; amplitude is 1 here
};

inline double wavelength(const CarrierConfig &cfg)
{
    return cfg.speed_of_light / cfg.carrier_freq;
}

// Far-field line-of-sight channel parameters of one (array, location) pair.
struct LinkParams
{
    double beta_mag = 0.0;  // |beta|, amplitude path loss
    double psi = 0.0;       // carrier phase 2 pi f_c tau, reduced to [0, 2 pi)
    double tau = 0.0;       // propagation delay, seconds
    double phi = 0.0;       // per-antenna phase step (2 pi / lambda) d cos(theta)
};

// theta is measured from the array axis; all antennas of an array share one
// amplitude toward a far-field location.
inline LinkParams compute_link(const ArrayDescriptor &array, const Location &loc,
                               const CarrierConfig &cfg)
{
    const double dist = distance(array.position, loc.position);
    if (!(dist > cfg.ref_distance))
        throw geometry_error("location at distance " + std::to_string(dist) +
                             " m is inside the reference distance " +
                             std::to_string(cfg.ref_distance) + " m");

    const double lambda = wavelength(cfg);
    const double ux = (loc.position.x - array.position.x) / dist;
    const double uy = (loc.position.y - array.position.y) / dist;
    const double cos_theta = ux * std::cos(array.axis_angle) + uy * std::sin(array.axis_angle);

    LinkParams link;
    link.tau = dist / cfg.speed_of_light;
    const double two_pi = 2.0 * M_PI;
    link.psi = std::fmod(two_pi * cfg.carrier_freq * link.tau, two_pi);
    if (link.psi < 0.0)
        link.psi += two_pi;
    link.phi = two_pi / lambda * array.spacing * cos_theta;
    link.beta_mag = std::pow(dist / cfg.ref_distance, -cfg.path_loss_exponent / 2.0);
    return link;
}

// Maps a steering phase back to a physical angle from the array axis.
// Phases with |phi lambda / (2 pi d)| > 1 have no physical direction.
inline std::optional<double> phi_to_theta(double phi, double spacing, double lambda)
{
    const double c = phi * lambda / (2.0 * M_PI * spacing);
    if (std::abs(c) > 1.0)
        return std::nullopt;
    return std::acos(c);
}

} // namespace beamspot

#endif
