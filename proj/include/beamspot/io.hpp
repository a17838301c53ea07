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

#ifndef beamspot_io_H
#define beamspot_io_H

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gridsweep.hpp"
#include "signals.hpp"

namespace beamspot
{

namespace iodetail
{

inline std::ofstream open_out(const std::string &path, bool binary)
{
    std::ofstream out(path, binary ? (std::ios::binary | std::ios::out) : std::ios::out);
    if (!out)
        throw io_error("cannot open \"" + path + "\" for writing");
    return out;
}

inline std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline double to_db(double v)
{
    return 10.0 * std::log10(v);
}

template <typename T>
inline void put(std::ofstream &out, const T &v)
{
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
inline void take(std::ifstream &in, T &v, const std::string &path)
{
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in)
        throw io_error("truncated map file \"" + path + "\"");
}

} // namespace iodetail

// Column file for one directivity sweep: angle, then linear and dB values
// of the signal and distortion patterns.
inline void write_directivity_csv(const std::string &path, const std::vector<double> &theta_deg,
                                  const std::vector<double> &signal,
                                  const std::vector<double> &distortion)
{
    if (theta_deg.size() != signal.size() || theta_deg.size() != distortion.size())
        throw io_error("directivity columns differ in length");
    std::ofstream out = iodetail::open_out(path, false);
    out << "theta_deg,signal_lin,signal_db,distortion_lin,distortion_db\n";
    for (std::size_t i = 0; i < theta_deg.size(); ++i)
        out << iodetail::fmt(theta_deg[i]) << ',' << iodetail::fmt(signal[i]) << ','
            << iodetail::fmt(iodetail::to_db(signal[i])) << ',' << iodetail::fmt(distortion[i])
            << ',' << iodetail::fmt(iodetail::to_db(distortion[i])) << '\n';
    if (!out)
        throw io_error("failed writing \"" + path + "\"");
}

// Column file for one or more spectra on a shared frequency grid.
inline void write_spectrum_csv(const std::string &path,
                               const std::vector<std::string> &names,
                               const std::vector<const SpectrumGrid *> &spectra)
{
    if (names.empty() || names.size() != spectra.size())
        throw io_error("spectrum columns and names differ in length");
    const std::size_t n = spectra[0]->num_points();
    for (const SpectrumGrid *s : spectra)
        if (s->num_points() != n)
            throw io_error("spectra differ in grid size");
    std::ofstream out = iodetail::open_out(path, false);
    out << "freq_offset_hz";
    for (const std::string &name : names)
        out << ',' << name << "_density," << name << "_db";
    out << '\n';
    for (std::size_t i = 0; i < n; ++i)
    {
        out << iodetail::fmt(spectra[0]->omega(i) / (2.0 * M_PI));
        for (const SpectrumGrid *s : spectra)
        {
            const double v = s->values[i].real();
            out << ',' << iodetail::fmt(v) << ',' << iodetail::fmt(iodetail::to_db(v));
        }
        out << '\n';
    }
    if (!out)
        throw io_error("failed writing \"" + path + "\"");
}

// Binary map container: magic "BSPT", version, grid geometry, then three
// row-major f64 layers (signal, distortion, mask as 0/1). Little-endian
// doubles; reruns of the same scenario are byte-identical.
inline void write_map_bspt(const std::string &path, const FocusingMap &map)
{
    std::ofstream out = iodetail::open_out(path, true);
    out.write("BSPT", 4);
    iodetail::put(out, std::uint32_t(1));
    iodetail::put(out, std::uint32_t(map.nx));
    iodetail::put(out, std::uint32_t(map.ny));
    iodetail::put(out, map.origin_x);
    iodetail::put(out, map.origin_y);
    iodetail::put(out, map.step);
    iodetail::put(out, map.mask_radius);
    iodetail::put(out, std::uint32_t(3));
    for (double v : map.signal)
        iodetail::put(out, v);
    for (double v : map.distortion)
        iodetail::put(out, v);
    for (std::uint8_t v : map.mask)
        iodetail::put(out, double(v));
    if (!out)
        throw io_error("failed writing \"" + path + "\"");
}

inline FocusingMap read_map_bspt(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open map file \"" + path + "\"");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "BSPT", 4) != 0)
        throw io_error("\"" + path + "\" is not a map file");
    std::uint32_t version = 0, nx = 0, ny = 0, layers = 0;
    iodetail::take(in, version, path);
    if (version != 1)
        throw io_error("unsupported map version in \"" + path + "\"");
    iodetail::take(in, nx, path);
    iodetail::take(in, ny, path);
    FocusingMap map;
    map.nx = nx;
    map.ny = ny;
    iodetail::take(in, map.origin_x, path);
    iodetail::take(in, map.origin_y, path);
    iodetail::take(in, map.step, path);
    iodetail::take(in, map.mask_radius, path);
    iodetail::take(in, layers, path);
    if (layers != 3)
        throw io_error("unexpected layer count in \"" + path + "\"");
    const std::size_t count = std::size_t(nx) * std::size_t(ny);
    map.signal.resize(count);
    map.distortion.resize(count);
    map.mask.resize(count);
    for (double &v : map.signal)
        iodetail::take(in, v, path);
    for (double &v : map.distortion)
        iodetail::take(in, v, path);
    for (std::size_t i = 0; i < count; ++i)
    {
        double v = 0.0;
        iodetail::take(in, v, path);
        map.mask[i] = v != 0.0 ? 1 : 0;
    }
    return map;
}

// CSV export of a map: one row per cell.
inline void write_map_csv(const std::string &path, const FocusingMap &map)
{
    std::ofstream out = iodetail::open_out(path, false);
    out << "x_m,y_m,masked,signal_focusing,distortion_focusing\n";
    for (std::size_t iy = 0; iy < map.ny; ++iy)
        for (std::size_t ix = 0; ix < map.nx; ++ix)
        {
            const std::size_t idx = map.index(ix, iy);
            out << iodetail::fmt(map.x_at(ix)) << ',' << iodetail::fmt(map.y_at(iy)) << ','
                << int(map.mask[idx]) << ',' << iodetail::fmt(map.signal[idx]) << ','
                << iodetail::fmt(map.distortion[idx]) << '\n';
        }
    if (!out)
        throw io_error("failed writing \"" + path + "\"");
}

inline void write_text_file(const std::string &path, const std::string &content)
{
    std::ofstream out = iodetail::open_out(path, false);
    out << content;
    if (!out)
        throw io_error("failed writing \"" + path + "\"");
}

} // namespace beamspot

#endif
