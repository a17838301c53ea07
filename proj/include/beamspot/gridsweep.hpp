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

#ifndef beamspot_gridsweep_H
#define beamspot_gridsweep_H

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "psd_engine.hpp"
#include "signals.hpp"
#include "threading.hpp"

namespace beamspot
{

// Spatial evaluation grid over the cell. A zero step selects half a
// carrier wavelength, the sampling that resolves small-scale fading.
struct CellSpec
{
    double width_m = 100.0;
    double height_m = 100.0;
    double step_m = 0.0;
    double eval_freq_offset_hz = 0.0;
    bool band_average = false;
};

enum class MapLayer
{
    signal,
    distortion
};

// Spatial-focusing result: signal and third-order distortion layers on the
// cell grid, each normalized by its mean over unmasked cells, plus the
// exclusion mask around the arrays.
struct FocusingMap
{
    std::size_t nx = 0, ny = 0;
    double origin_x = 0.0, origin_y = 0.0;
    double step = 0.0;
    double mask_radius = 0.0;
    double eval_freq_offset_hz = 0.0;
    bool band_average = false;
    std::vector<double> signal;
    std::vector<double> distortion;
    std::vector<std::uint8_t> mask;  // 1 = excluded

    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
    double x_at(std::size_t ix) const { return origin_x + double(ix) * step; }
    double y_at(std::size_t iy) const { return origin_y + double(iy) * step; }
    const std::vector<double> &layer(MapLayer which) const
    {
        return which == MapLayer::signal ? signal : distortion;
    }
};

namespace detail
{

// Everything observer-independent, precomputed once per sweep: link
// parameters, amplifier coefficients, per-triple phases, and the
// triple-shifted spectral values at the evaluation frequency.
struct SweepContext
{
    const Scenario *scenario = nullptr;
    LinkTable links;
    double c1 = 0.0, c3 = 0.0;
    double base_density = 0.0;  // S(w0), the normalized pulse density
    double omega0 = 0.0;
    bool band_average = false;
    PulseSpec pulse;

    struct Triple
    {
        std::size_t k = 0, k2 = 0, k3 = 0;
        double weight = 0.0;                    // p_k p_k' p_k'' (doubled off-diagonal)
        std::vector<double> psi, phi;           // per array
        std::vector<std::array<double, 3>> dt;  // per pair (m' <= m): delay deltas
        std::vector<cdouble> s3;                // per pair: S3 at w0
    };
    std::vector<Triple> triples;

    std::size_t pair_index(std::size_t m, std::size_t m2) const
    {
        return m * (m + 1) / 2 + m2;
    }
};

inline SweepContext make_context(const Scenario &scenario, const CellSpec &cell)
{
    validate(scenario);
    SweepContext ctx;
    ctx.scenario = &scenario;
    ctx.links = user_links(scenario);
    ctx.omega0 = 2.0 * M_PI * cell.eval_freq_offset_hz;
    ctx.band_average = cell.band_average;
    ctx.pulse = scenario.pulse;

    const std::size_t grid_points = 4096;
    const double span = 8.0 * scenario.pulse.bandwidth;
    if (std::abs(cell.eval_freq_offset_hz) > span / 2.0)
        throw config_error("evaluation frequency offset lies outside the spectrum span");
    const SpectrumGrid base = raised_cosine_spectrum(scenario.pulse, grid_points, span);
    const CorrelationGrid corr = autocorrelation(base);
    const double sigma2 = pa_input_power(scenario.users, corr);
    const PaOutputCoefficients c = output_coefficients(scenario.pa, sigma2);
    ctx.c1 = c.c1;
    ctx.c3 = c.c3;

    // Normalized pulse density at the evaluation frequency.
    {
        const double df = span / double(grid_points);
        double acc = 0.0;
        for (std::size_t i = 0; i < grid_points; ++i)
            acc += raised_cosine_density(scenario.pulse,
                                         (double(i) - double(grid_points) / 2.0) * df);
        ctx.base_density =
            raised_cosine_density(scenario.pulse, cell.eval_freq_offset_hz) / (acc * df);
    }

    const std::size_t M = scenario.num_arrays();
    const std::size_t K = scenario.users.count();
    const std::size_t num_pairs = M * (M + 1) / 2;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t k2 = k; k2 < K; ++k2)
            for (std::size_t k3 = 0; k3 < K; ++k3)
            {
                SweepContext::Triple t;
                t.k = k;
                t.k2 = k2;
                t.k3 = k3;
                const double mult = (k == k2) ? 1.0 : 2.0;
                t.weight = mult * scenario.users.powers[k] * scenario.users.powers[k2] *
                           scenario.users.powers[k3];
                t.psi.resize(M);
                t.phi.resize(M);
                for (std::size_t m = 0; m < M; ++m)
                {
                    t.psi[m] = ctx.links.at(m, k).psi + ctx.links.at(m, k2).psi -
                               ctx.links.at(m, k3).psi;
                    t.phi[m] = ctx.links.at(m, k).phi + ctx.links.at(m, k2).phi -
                               ctx.links.at(m, k3).phi;
                }
                t.dt.resize(num_pairs);
                t.s3.resize(num_pairs);
                for (std::size_t m = 0; m < M; ++m)
                    for (std::size_t m2 = 0; m2 <= m; ++m2)
                    {
                        const std::size_t pi = ctx.pair_index(m, m2);
                        const double d1 = ctx.links.at(m, k).tau - ctx.links.at(m2, k).tau;
                        const double d2 = ctx.links.at(m, k2).tau - ctx.links.at(m2, k2).tau;
                        const double d3 = ctx.links.at(m, k3).tau - ctx.links.at(m2, k3).tau;
                        t.dt[pi] = {d1, d2, d3};
                        if (!cell.band_average)
                        {
                            // Lag-domain evaluation of the triple-shifted
                            // spectrum at w0, matching the PSD engine's bin
                            // values exactly when w0 sits on its grid.
                            const CorrelationGrid r1 = shift_correlation(corr, d1);
                            const CorrelationGrid r2 = shift_correlation(corr, d2);
                            const CorrelationGrid r3 = shift_correlation(corr, d3);
                            cdouble acc = 0.0;
                            for (std::size_t j = 0; j < corr.num_points(); ++j)
                            {
                                const cdouble p =
                                    r1.values[j] * r2.values[j] * std::conj(r3.values[j]);
                                acc += p * std::polar(1.0, -ctx.omega0 * corr.lag(j));
                            }
                            t.s3[pi] = acc * corr.lag_step;
                        }
                    }
                ctx.triples.push_back(std::move(t));
            }
    return ctx;
}

// Signal and distortion PSD values at one observer location.
inline void evaluate_point(const SweepContext &ctx, const Location &observer, double &sig,
                           double &dis)
{
    const Scenario &scenario = *ctx.scenario;
    const std::size_t M = scenario.num_arrays();
    const std::size_t K = scenario.users.count();
    std::vector<LinkParams> obs(M);
    for (std::size_t m = 0; m < M; ++m)
        obs[m] = compute_link(scenario.arrays[m], observer, scenario.carrier);

    // Linear beams: every array toward every user, coherent across arrays.
    sig = 0.0;
    std::vector<cdouble> beam(M);
    for (std::size_t k = 0; k < K; ++k)
    {
        for (std::size_t m = 0; m < M; ++m)
        {
            const LinkParams &u = ctx.links.at(m, k);
            beam[m] = obs[m].beta_mag * std::polar(1.0, u.psi - obs[m].psi) *
                      dirichlet(scenario.arrays[m].num_antennas, u.phi - obs[m].phi);
        }
        if (!ctx.band_average)
        {
            cdouble field = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                field += beam[m] * std::polar(1.0, ctx.omega0 * (ctx.links.at(m, k).tau -
                                                                 obs[m].tau));
            sig += scenario.users.powers[k] * std::norm(field);
        }
        else
        {
            // Band average: pair the beams through the closed-form pulse
            // autocorrelation at the residual delay mismatch.
            double acc = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t m2 = 0; m2 <= m; ++m2)
                {
                    const double delay = (ctx.links.at(m, k).tau - obs[m].tau) -
                                         (ctx.links.at(m2, k).tau - obs[m2].tau);
                    const double r = raised_cosine_autocorr(ctx.pulse, delay);
                    const cdouble term = beam[m] * std::conj(beam[m2]) * r;
                    acc += (m == m2) ? term.real() : 2.0 * term.real();
                }
            sig += scenario.users.powers[k] * acc;
        }
    }
    sig *= ctx.c1 * (ctx.band_average ? 1.0 : ctx.base_density);

    // Third-order beams: one per user triple, paired across arrays through
    // the triple-shifted spectrum.
    dis = 0.0;
    std::vector<cdouble> v(M);
    for (const SweepContext::Triple &t : ctx.triples)
    {
        for (std::size_t m = 0; m < M; ++m)
        {
            const double phase = ctx.band_average
                                     ? (t.psi[m] - obs[m].psi)
                                     : (t.psi[m] - obs[m].psi - ctx.omega0 * obs[m].tau);
            v[m] = obs[m].beta_mag * std::polar(1.0, phase) *
                   dirichlet(scenario.arrays[m].num_antennas, t.phi[m] - obs[m].phi);
        }
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t m2 = 0; m2 <= m; ++m2)
            {
                const std::size_t pi = ctx.pair_index(m, m2);
                cdouble pair;
                if (!ctx.band_average)
                {
                    pair = v[m] * std::conj(v[m2]) * t.s3[pi];
                }
                else
                {
                    const std::array<double, 3> &d = t.dt[pi];
                    const double tau = obs[m2].tau - obs[m].tau;
                    const double p3 = raised_cosine_autocorr(ctx.pulse, tau + d[0]) *
                                      raised_cosine_autocorr(ctx.pulse, tau + d[1]) *
                                      raised_cosine_autocorr(ctx.pulse, tau + d[2]);
                    pair = v[m] * std::conj(v[m2]) * p3;
                }
                acc += (m == m2) ? pair.real() : 2.0 * pair.real();
            }
        dis += t.weight * acc;
    }
    dis *= ctx.c3;
}

} // namespace detail

// Sweeps the closed-form signal and third-order distortion over the cell
// grid, masks cells on top of the arrays, and normalizes each layer by its
// unmasked spatial mean. Deterministic for any worker count: every point
// writes its own slot.
inline FocusingMap sweep(const Scenario &scenario, const CellSpec &cell,
                         std::size_t num_threads = 1)
{
    if (!(cell.width_m > 0.0) || !(cell.height_m > 0.0))
        throw config_error("cell extent must be positive");
    if (cell.step_m < 0.0)
        throw config_error("cell step must be >= 0");
    const detail::SweepContext ctx = detail::make_context(scenario, cell);

    const double lambda = wavelength(scenario.carrier);
    FocusingMap map;
    map.step = cell.step_m > 0.0 ? cell.step_m : lambda / 2.0;
    map.nx = std::size_t(std::floor(cell.width_m / map.step)) + 1;
    map.ny = std::size_t(std::floor(cell.height_m / map.step)) + 1;
    map.mask_radius = std::max(scenario.carrier.ref_distance, 2.0 * lambda);
    map.eval_freq_offset_hz = cell.eval_freq_offset_hz;
    map.band_average = cell.band_average;
    map.signal.assign(map.nx * map.ny, 0.0);
    map.distortion.assign(map.nx * map.ny, 0.0);
    map.mask.assign(map.nx * map.ny, 0);

    for (const Location &ue : scenario.users.locations)
        if (ue.position.x < 0.0 || ue.position.x > cell.width_m || ue.position.y < 0.0 ||
            ue.position.y > cell.height_m)
            throw config_error("every user must lie inside the cell");

    parallel_for(0, map.ny, num_threads, [&](std::size_t row_lo, std::size_t row_hi) {
        for (std::size_t iy = row_lo; iy < row_hi; ++iy)
            for (std::size_t ix = 0; ix < map.nx; ++ix)
            {
                const Location point{Vec2{map.x_at(ix), map.y_at(iy)}};
                bool masked = false;
                for (const ArrayDescriptor &a : scenario.arrays)
                    if (distance(a.position, point.position) <= map.mask_radius)
                    {
                        masked = true;
                        break;
                    }
                const std::size_t idx = map.index(ix, iy);
                if (masked)
                {
                    map.mask[idx] = 1;
                    continue;
                }
                double sig = 0.0, dis = 0.0;
                detail::evaluate_point(ctx, point, sig, dis);
                map.signal[idx] = sig;
                map.distortion[idx] = dis;
            }
    });

    // Normalize each layer by its unmasked mean.
    std::size_t live = 0;
    double sig_mean = 0.0, dis_mean = 0.0;
    for (std::size_t i = 0; i < map.mask.size(); ++i)
        if (map.mask[i] == 0)
        {
            ++live;
            sig_mean += map.signal[i];
            dis_mean += map.distortion[i];
        }
    if (live == 0)
        throw config_error("the exclusion mask covers the whole cell");
    sig_mean /= double(live);
    dis_mean /= double(live);
    if (sig_mean > 0.0)
        for (double &v : map.signal)
            v /= sig_mean;
    if (dis_mean > 0.0)
        for (double &v : map.distortion)
            v /= dis_mean;
    return map;
}

// Standard deviation of 10 log10(value) over unmasked cells; zero for an
// identically zero layer (a linear amplifier has no distortion layer).
inline double uniformity_metric(const FocusingMap &map, MapLayer which)
{
    const std::vector<double> &values = map.layer(which);
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (map.mask[i] == 0 && values[i] > 0.0)
        {
            mean += 10.0 * std::log10(values[i]);
            ++count;
        }
    if (count == 0)
        return 0.0;
    mean /= double(count);
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (map.mask[i] == 0 && values[i] > 0.0)
        {
            const double d = 10.0 * std::log10(values[i]) - mean;
            var += d * d;
        }
    return std::sqrt(var / double(count));
}

// One local maximum of a map layer.
struct Peak
{
    double x = 0.0, y = 0.0;
    double value = 0.0;
    double nearest_user_distance = 0.0;
};

// Local maxima (8-neighborhood, unmasked) above threshold_frac times the
// layer maximum, each annotated with the distance to the closest user.
inline std::vector<Peak> peak_report(const FocusingMap &map, MapLayer which,
                                     const UserSet &users, double threshold_frac = 0.5)
{
    const std::vector<double> &values = map.layer(which);
    double top = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (map.mask[i] == 0)
            top = std::max(top, values[i]);
    const double threshold = threshold_frac * top;

    std::vector<Peak> peaks;
    for (std::size_t iy = 0; iy < map.ny; ++iy)
        for (std::size_t ix = 0; ix < map.nx; ++ix)
        {
            const std::size_t idx = map.index(ix, iy);
            if (map.mask[idx] != 0 || values[idx] < threshold || values[idx] <= 0.0)
                continue;
            bool is_peak = true;
            for (int dy = -1; dy <= 1 && is_peak; ++dy)
                for (int dx = -1; dx <= 1 && is_peak; ++dx)
                {
                    if (dx == 0 && dy == 0)
                        continue;
                    const long jx = long(ix) + dx;
                    const long jy = long(iy) + dy;
                    if (jx < 0 || jy < 0 || jx >= long(map.nx) || jy >= long(map.ny))
                        continue;
                    const std::size_t jdx = map.index(std::size_t(jx), std::size_t(jy));
                    if (map.mask[jdx] == 0 && values[jdx] > values[idx])
                        is_peak = false;
                }
            if (!is_peak)
                continue;
            Peak p;
            p.x = map.x_at(ix);
            p.y = map.y_at(iy);
            p.value = values[idx];
            double best = -1.0;
            for (const Location &ue : users.locations)
            {
                const double d = distance(Vec2{p.x, p.y}, ue.position);
                if (best < 0.0 || d < best)
                    best = d;
            }
            p.nearest_user_distance = best;
            peaks.push_back(p);
        }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak &a, const Peak &b) { return a.value > b.value; });
    return peaks;
}

} // namespace beamspot

#endif
