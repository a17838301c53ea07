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

#ifndef beamspot_signals_H
#define beamspot_signals_H

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"

namespace beamspot
{

// Fourier convention used across the library:
//   S(w) = integral R(tau) e^{-j w tau} d tau,
//   R(tau) = (1 / 2 pi) integral S(w) e^{+j w tau} d w.
// Both grids are centered: index i maps to (i - n/2) * step, so bin n/2 is
// exactly zero. Grid sizes are powers of two (>= 4).

// Frequency grid; for a PSD the values are real and (up to numerical noise)
// nonnegative, in per-Hz density units: (freq_step / 2 pi) * sum(values)
// equals the total power.
struct SpectrumGrid
{
    double freq_step = 0.0;  // rad/s
    std::vector<cdouble> values;

    std::size_t num_points() const { return values.size(); }
    double omega(std::size_t i) const
    {
        return (double(i) - double(values.size()) / 2.0) * freq_step;
    }
    double total_power() const
    {
        double acc = 0.0;
        for (const cdouble &v : values)
            acc += v.real();
        return acc * freq_step / (2.0 * M_PI);
    }
};

// Matched lag grid: lag_step = 2 pi / (n * freq_step).
struct CorrelationGrid
{
    double lag_step = 0.0;  // seconds
    std::vector<cdouble> values;

    std::size_t num_points() const { return values.size(); }
    double lag(std::size_t i) const
    {
        return (double(i) - double(values.size()) / 2.0) * lag_step;
    }
    const cdouble &at_zero() const { return values[values.size() / 2]; }
};

// Base pulse: raised-cosine PSD with two-sided occupied band `bandwidth`
// and roll-off alpha, normalized so R(0) = 1.
struct PulseSpec
{
    double bandwidth = 10e6;  // Hz, two-sided
    double rolloff = 0.22;    // in [0, 1]
};

inline void validate(const PulseSpec &pulse)
{
    if (!(pulse.bandwidth > 0.0))
        throw config_error("pulse bandwidth must be > 0");
    if (pulse.rolloff < 0.0 || pulse.rolloff > 1.0)
        throw config_error("pulse rolloff must be within [0, 1]");
}

// Unnormalized raised-cosine density at baseband frequency f (Hz): plateau
// T = 1/B inside (1-a)B/2, cosine taper out to (1+a)B/2, zero beyond.
inline double raised_cosine_density(const PulseSpec &pulse, double f)
{
    const double B = pulse.bandwidth;
    const double a = pulse.rolloff;
    const double T = 1.0 / B;
    const double af = std::abs(f);
    const double f1 = (1.0 - a) * B / 2.0;
    const double f2 = (1.0 + a) * B / 2.0;
    if (af <= f1)
        return T;
    if (af >= f2)
        return 0.0;
    return T / 2.0 * (1.0 + std::cos(M_PI * T / a * (af - f1)));
}

// Closed-form autocorrelation of the unit-power raised cosine:
//   R(tau) = sinc(tau/T) cos(pi a tau/T) / (1 - (2 a tau/T)^2),
// with the removable singularity at tau = T/(2a) evaluated by its limit.
inline double raised_cosine_autocorr(const PulseSpec &pulse, double tau)
{
    const double T = 1.0 / pulse.bandwidth;
    const double a = pulse.rolloff;
    const double t = tau / T;
    const double sinc = (t == 0.0) ? 1.0 : std::sin(M_PI * t) / (M_PI * t);
    if (a == 0.0)
        return sinc;
    const double den = 1.0 - (2.0 * a * t) * (2.0 * a * t);
    if (std::abs(den) < 1e-7)
    {
        // Limit at 2 a t -> 1: (pi / 4) sinc(1 / (2 a)).
        const double u = 1.0 / (2.0 * a);
        const double s = std::sin(M_PI * u) / (M_PI * u);
        return M_PI / 4.0 * s;
    }
    return sinc * std::cos(M_PI * a * t) / den;
}

// Samples the raised cosine on a centered grid of num_points bins spanning
// span_hz (two-sided), exactly normalized to unit power on the grid. The
// span must hold at least triple the occupied band so third-order regrowth
// fits without aliasing.
inline SpectrumGrid raised_cosine_spectrum(const PulseSpec &pulse, std::size_t num_points,
                                           double span_hz)
{
    validate(pulse);
    const double occupied = pulse.bandwidth * (1.0 + pulse.rolloff);
    if (span_hz < 3.0 * occupied)
        throw config_error("spectrum span " + std::to_string(span_hz) +
                           " Hz is narrower than 3x the occupied band " +
                           std::to_string(occupied) + " Hz");
    if (num_points < 4 || (num_points & (num_points - 1)) != 0)
        throw config_error("spectrum grid size must be a power of two >= 4");

    SpectrumGrid grid;
    const double df = span_hz / double(num_points);
    grid.freq_step = 2.0 * M_PI * df;
    grid.values.resize(num_points);
    double acc = 0.0;
    for (std::size_t i = 0; i < num_points; ++i)
    {
        const double f = (double(i) - double(num_points) / 2.0) * df;
        const double v = raised_cosine_density(pulse, f);
        grid.values[i] = v;
        acc += v;
    }
    const double scale = 1.0 / (acc * df);
    for (cdouble &v : grid.values)
        v *= scale;
    return grid;
}

inline double lag_step_for(const SpectrumGrid &spectrum)
{
    return 2.0 * M_PI / (double(spectrum.num_points()) * spectrum.freq_step);
}

// R(tau) on the matched lag grid (inverse transform).
inline CorrelationGrid autocorrelation(const SpectrumGrid &spectrum)
{
    const std::size_t n = spectrum.num_points();
    FftPlan plan(n);
    CorrelationGrid corr;
    corr.lag_step = lag_step_for(spectrum);
    corr.values = spectrum.values;
    centered_inverse(plan, corr.values);
    // x[j] carries 1/n from the inverse FFT; the integral carries dw / 2 pi.
    const double scale = double(n) * spectrum.freq_step / (2.0 * M_PI);
    for (cdouble &v : corr.values)
        v *= scale;
    return corr;
}

// Forward transform back to the frequency grid.
inline SpectrumGrid spectrum_from_correlation(const CorrelationGrid &corr)
{
    const std::size_t n = corr.num_points();
    FftPlan plan(n);
    SpectrumGrid spectrum;
    spectrum.freq_step = 2.0 * M_PI / (double(n) * corr.lag_step);
    spectrum.values = corr.values;
    centered_forward(plan, spectrum.values);
    for (cdouble &v : spectrum.values)
        v *= corr.lag_step;
    return spectrum;
}

// R(tau + delta) via a frequency-domain phase ramp (exact for band-limited
// signals). delta beyond half the lag window would wrap.
inline CorrelationGrid shift_correlation(const CorrelationGrid &corr, double delta)
{
    const std::size_t n = corr.num_points();
    const double window = double(n) * corr.lag_step;
    if (std::abs(delta) > window / 2.0)
        throw aliasing_error("lag shift " + std::to_string(delta) +
                             " s exceeds half the lag window " + std::to_string(window / 2.0) +
                             " s");
    SpectrumGrid spectrum = spectrum_from_correlation(corr);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double w = spectrum.omega(i);
        spectrum.values[i] *= std::polar(1.0, w * delta);
    }
    CorrelationGrid out = autocorrelation(spectrum);
    out.lag_step = corr.lag_step;
    return out;
}

// S^(l)(w): Fourier transform of R(tau) |R(tau)|^{l-1} for odd l >= 1.
inline SpectrumGrid self_spectrum(const CorrelationGrid &corr, int order)
{
    if (order < 1 || order % 2 == 0)
        throw order_error("self spectrum order must be odd and >= 1, got " +
                          std::to_string(order));
    CorrelationGrid prod = corr;
    for (std::size_t i = 0; i < prod.values.size(); ++i)
    {
        const double mag2 = std::norm(corr.values[i]);
        double w = 1.0;
        for (int l = 3; l <= order; l += 2)
            w *= mag2;
        prod.values[i] *= w;
    }
    return spectrum_from_correlation(prod);
}

// Fourier transform of R(tau + d1) R(tau + d2) R*(tau + d3). Equals the
// triple spectral convolution of phase-ramped copies of S, carried out in
// the lag domain with one forward transform.
inline SpectrumGrid shifted_triple_spectrum(const CorrelationGrid &corr, double d1, double d2,
                                            double d3)
{
    const CorrelationGrid r1 = shift_correlation(corr, d1);
    const CorrelationGrid r2 = shift_correlation(corr, d2);
    const CorrelationGrid r3 = shift_correlation(corr, d3);
    CorrelationGrid prod;
    prod.lag_step = corr.lag_step;
    prod.values.resize(corr.num_points());
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = r1.values[i] * r2.values[i] * std::conj(r3.values[i]);
    return spectrum_from_correlation(prod);
}

} // namespace beamspot

#endif
