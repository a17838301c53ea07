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

#ifndef beamspot_scenario_config_H
#define beamspot_scenario_config_H

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "gridsweep.hpp"
#include "montecarlo.hpp"
#include "psd_engine.hpp"

namespace beamspot
{

// Simulation settings for the time-domain oracle.
struct McSettings
{
    std::size_t num_blocks = 64;
    std::size_t block_length = 65536;
    double sample_rate_hz = 0.0;  // 0 selects 4x the pulse bandwidth
    std::uint64_t seed = 1;
    WelchConfig welch;
};

// Frequency grid for the analytic engine.
struct SpectrumSpec
{
    std::size_t num_points = 4096;
    double span_hz = 0.0;  // 0 selects 8x the pulse bandwidth
};

// A fully parsed scenario file: the physical scenario plus the numerical
// settings, the canonical serialized form, and its hash.
struct FullConfig
{
    Scenario scenario;
    CellSpec cell;
    McSettings mc;
    SpectrumSpec spectrum;
    std::string canonical;
    std::uint64_t config_hash = 0;
};

inline std::uint64_t fnv1a64(const std::string &text)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace cfgdetail
{

using nlohmann::json;

inline void reject_unknown(const json &obj, const std::string &path,
                           const std::set<std::string> &allowed)
{
    for (const auto &item : obj.items())
        if (allowed.find(item.key()) == allowed.end())
            throw config_error("unknown key \"" + path + item.key() + "\"");
}

inline const json *find(const json &obj, const char *key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double require_num(const json &obj, const std::string &path, const char *key)
{
    const json *v = find(obj, key);
    if (v == nullptr)
        throw config_error("missing key \"" + path + key + "\"");
    if (!v->is_number())
        throw config_error("key \"" + path + key + "\" must be a number");
    return v->get<double>();
}

inline double optional_num(const json &obj, const std::string &path, const char *key,
                           double fallback)
{
    const json *v = find(obj, key);
    if (v == nullptr)
        return fallback;
    if (!v->is_number())
        throw config_error("key \"" + path + key + "\" must be a number");
    return v->get<double>();
}

inline bool optional_bool(const json &obj, const std::string &path, const char *key,
                          bool fallback)
{
    const json *v = find(obj, key);
    if (v == nullptr)
        return fallback;
    if (!v->is_boolean())
        throw config_error("key \"" + path + key + "\" must be a boolean");
    return v->get<bool>();
}

inline long optional_int(const json &obj, const std::string &path, const char *key,
                         long fallback)
{
    const json *v = find(obj, key);
    if (v == nullptr)
        return fallback;
    if (!v->is_number_integer())
        throw config_error("key \"" + path + key + "\" must be an integer");
    return v->get<long>();
}

} // namespace cfgdetail

inline FullConfig parse_config(const nlohmann::json &doc)
{
    using cfgdetail::optional_bool;
    using cfgdetail::optional_int;
    using cfgdetail::optional_num;
    using cfgdetail::require_num;
    using nlohmann::json;

    if (!doc.is_object())
        throw config_error("scenario document must be a JSON object");
    cfgdetail::reject_unknown(
        doc, "", {"carrier", "pulse", "pa", "arrays", "users", "grid", "montecarlo", "spectrum"});

    FullConfig out;

    const json *carrier = cfgdetail::find(doc, "carrier");
    if (carrier == nullptr || !carrier->is_object())
        throw config_error("missing \"carrier\" section");
    cfgdetail::reject_unknown(*carrier, "carrier.",
                              {"freq_hz", "path_loss_exponent", "ref_distance_m"});
    out.scenario.carrier.carrier_freq = require_num(*carrier, "carrier.", "freq_hz");
    out.scenario.carrier.path_loss_exponent =
        optional_num(*carrier, "carrier.", "path_loss_exponent", 2.0);
    out.scenario.carrier.ref_distance =
        optional_num(*carrier, "carrier.", "ref_distance_m", 1.0);

    if (const json *pulse = cfgdetail::find(doc, "pulse"))
    {
        if (!pulse->is_object())
            throw config_error("\"pulse\" must be an object");
        cfgdetail::reject_unknown(*pulse, "pulse.", {"bandwidth_hz", "rolloff"});
        out.scenario.pulse.bandwidth = optional_num(*pulse, "pulse.", "bandwidth_hz", 10e6);
        out.scenario.pulse.rolloff = optional_num(*pulse, "pulse.", "rolloff", 0.22);
    }

    if (const json *pa = cfgdetail::find(doc, "pa"))
    {
        if (!pa->is_object())
            throw config_error("\"pa\" must be an object");
        cfgdetail::reject_unknown(*pa, "pa.", {"b1_real", "b1_imag", "b3_real", "b3_imag"});
        out.scenario.pa.b1 = cdouble(optional_num(*pa, "pa.", "b1_real", 1.0),
                                     optional_num(*pa, "pa.", "b1_imag", 0.0));
        out.scenario.pa.b3 = cdouble(optional_num(*pa, "pa.", "b3_real", 0.0),
                                     optional_num(*pa, "pa.", "b3_imag", 0.0));
    }

    const double lambda =
        out.scenario.carrier.speed_of_light / out.scenario.carrier.carrier_freq;

    const json *arrays = cfgdetail::find(doc, "arrays");
    if (arrays == nullptr || !arrays->is_array() || arrays->empty())
        throw config_error("missing non-empty \"arrays\" list");
    for (std::size_t i = 0; i < arrays->size(); ++i)
    {
        const json &a = (*arrays)[i];
        const std::string path = "arrays[" + std::to_string(i) + "].";
        if (!a.is_object())
            throw config_error("\"arrays\" entries must be objects");
        cfgdetail::reject_unknown(a, path,
                                  {"x_m", "y_m", "axis_deg", "num_antennas", "spacing_m"});
        ArrayDescriptor d;
        d.position = Vec2{require_num(a, path, "x_m"), require_num(a, path, "y_m")};
        d.axis_angle = optional_num(a, path, "axis_deg", 0.0) * M_PI / 180.0;
        d.num_antennas = int(optional_int(a, path, "num_antennas", 1));
        d.spacing = optional_num(a, path, "spacing_m", lambda / 2.0);
        out.scenario.arrays.push_back(d);
    }

    const json *users = cfgdetail::find(doc, "users");
    if (users == nullptr || !users->is_array() || users->empty())
        throw config_error("missing non-empty \"users\" list");
    for (std::size_t i = 0; i < users->size(); ++i)
    {
        const json &u = (*users)[i];
        const std::string path = "users[" + std::to_string(i) + "].";
        if (!u.is_object())
            throw config_error("\"users\" entries must be objects");
        cfgdetail::reject_unknown(u, path, {"x_m", "y_m", "power_lin"});
        out.scenario.users.locations.push_back(
            Location{Vec2{require_num(u, path, "x_m"), require_num(u, path, "y_m")}});
        out.scenario.users.powers.push_back(optional_num(u, path, "power_lin", 1.0));
    }

    if (const json *grid = cfgdetail::find(doc, "grid"))
    {
        if (!grid->is_object())
            throw config_error("\"grid\" must be an object");
        cfgdetail::reject_unknown(
            *grid, "grid.",
            {"width_m", "height_m", "step_m", "eval_freq_offset_hz", "band_average"});
        out.cell.width_m = optional_num(*grid, "grid.", "width_m", 100.0);
        out.cell.height_m = optional_num(*grid, "grid.", "height_m", 100.0);
        out.cell.step_m = optional_num(*grid, "grid.", "step_m", 0.0);
        out.cell.eval_freq_offset_hz =
            optional_num(*grid, "grid.", "eval_freq_offset_hz", 0.0);
        out.cell.band_average = optional_bool(*grid, "grid.", "band_average", false);
    }

    if (const json *mc = cfgdetail::find(doc, "montecarlo"))
    {
        if (!mc->is_object())
            throw config_error("\"montecarlo\" must be an object");
        cfgdetail::reject_unknown(*mc, "montecarlo.",
                                  {"num_blocks", "block_length", "sample_rate_hz", "seed",
                                   "welch_segment", "welch_overlap", "window"});
        out.mc.num_blocks = std::size_t(optional_int(*mc, "montecarlo.", "num_blocks", 64));
        out.mc.block_length =
            std::size_t(optional_int(*mc, "montecarlo.", "block_length", 65536));
        out.mc.sample_rate_hz = optional_num(*mc, "montecarlo.", "sample_rate_hz", 0.0);
        out.mc.seed = std::uint64_t(optional_int(*mc, "montecarlo.", "seed", 1));
        out.mc.welch.segment_length =
            std::size_t(optional_int(*mc, "montecarlo.", "welch_segment", 512));
        out.mc.welch.overlap = optional_num(*mc, "montecarlo.", "welch_overlap", 0.5);
        if (const nlohmann::json *w = cfgdetail::find(*mc, "window"))
        {
            if (!w->is_string())
                throw config_error("key \"montecarlo.window\" must be a string");
            const std::string name = w->get<std::string>();
            if (name == "hann")
                out.mc.welch.window = WelchConfig::Window::hann;
            else if (name == "blackman_harris4")
                out.mc.welch.window = WelchConfig::Window::blackman_harris4;
            else
                throw config_error("unknown window \"" + name +
                                   "\" (expected hann or blackman_harris4)");
        }
    }
    out.mc.welch.wrap = true;  // simulation blocks are circular

    if (const json *spec = cfgdetail::find(doc, "spectrum"))
    {
        if (!spec->is_object())
            throw config_error("\"spectrum\" must be an object");
        cfgdetail::reject_unknown(*spec, "spectrum.", {"num_points", "span_hz"});
        out.spectrum.num_points =
            std::size_t(optional_int(*spec, "spectrum.", "num_points", 4096));
        out.spectrum.span_hz = optional_num(*spec, "spectrum.", "span_hz", 0.0);
    }

    validate(out.scenario);
    out.canonical = doc.dump();
    out.config_hash = fnv1a64(out.canonical);
    return out;
}

inline FullConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open scenario file \"" + path + "\"");
    nlohmann::json doc;
    try
    {
        in >> doc;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw config_error("cannot parse \"" + path + "\": " + e.what());
    }
    return parse_config(doc);
}

// Frequency grid for the analytic engine (span defaults to 8x bandwidth).
inline SpectrumGrid make_base_spectrum(const FullConfig &cfg)
{
    const double span =
        cfg.spectrum.span_hz > 0.0 ? cfg.spectrum.span_hz : 8.0 * cfg.scenario.pulse.bandwidth;
    return raised_cosine_spectrum(cfg.scenario.pulse, cfg.spectrum.num_points, span);
}

// Frequency grid matching the simulation blocks: block_length lines
// spanning the sample rate (default 4x bandwidth, alias-free for the
// third-order regrowth).
inline SpectrumGrid make_simulation_spectrum(const FullConfig &cfg)
{
    const double fs = cfg.mc.sample_rate_hz > 0.0 ? cfg.mc.sample_rate_hz
                                                  : 4.0 * cfg.scenario.pulse.bandwidth;
    return raised_cosine_spectrum(cfg.scenario.pulse, cfg.mc.block_length, fs);
}

} // namespace beamspot

#endif
