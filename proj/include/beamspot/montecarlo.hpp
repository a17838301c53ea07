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

#ifndef beamspot_montecarlo_H
#define beamspot_montecarlo_H

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "pa.hpp"
#include "psd_engine.hpp"
#include "rng.hpp"
#include "signals.hpp"

namespace beamspot
{

// One circular block of complex baseband samples.
struct TimeSeries
{
    double sample_rate = 0.0;  // Hz
    std::vector<cdouble> samples;
    std::uint64_t seed = 0;

    std::size_t length() const { return samples.size(); }
};

// Averaged-periodogram settings.
struct WelchConfig
{
    enum class Window
    {
        hann,
        blackman_harris4
    };

    std::size_t segment_length = 512;
    double overlap = 0.5;
    Window window = Window::blackman_harris4;
    // Segments may wrap past the end of the series. Valid for blocks that
    // are circularly stationary by construction (spectral synthesis).
    bool wrap = false;
};

inline void validate(const WelchConfig &cfg)
{
    if (cfg.segment_length < 4 || (cfg.segment_length & (cfg.segment_length - 1)) != 0)
        throw config_error("Welch segment length must be a power of two >= 4");
    if (cfg.overlap < 0.0 || cfg.overlap > 0.9)
        throw config_error("Welch overlap must be within [0, 0.9]");
}

inline std::vector<double> welch_window(WelchConfig::Window type, std::size_t length)
{
    std::vector<double> w(length);
    if (type == WelchConfig::Window::hann)
    {
        for (std::size_t j = 0; j < length; ++j)
            w[j] = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(j) / double(length));
    }
    else
    {
        const double a0 = 0.35875, a1 = 0.48829, a2 = 0.14128, a3 = 0.01168;
        for (std::size_t j = 0; j < length; ++j)
        {
            const double t = 2.0 * M_PI * double(j) / double(length);
            w[j] = a0 - a1 * std::cos(t) + a2 * std::cos(2.0 * t) - a3 * std::cos(3.0 * t);
        }
    }
    return w;
}

// Frequency-domain draw of one user block: independent CN(0, L fs S(f_i))
// spectral lines, so that the inverse transform is a circularly stationary
// Gaussian process with the target PSD. Counter-based: the draw for bin i
// of a given (seed, stream, block) never depends on call order.
inline std::vector<cdouble> spectral_draw(const SpectrumGrid &spectrum, std::uint64_t seed,
                                          std::uint64_t stream, std::uint64_t block)
{
    const std::size_t n = spectrum.num_points();
    const double fs = double(n) * spectrum.freq_step / (2.0 * M_PI);
    std::vector<cdouble> z(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double density = std::max(spectrum.values[i].real(), 0.0);
        const double sigma = std::sqrt(double(n) * fs * density);
        z[i] = sigma * rng::cgauss(seed, stream, block * n + i);
    }
    return z;
}

// Gaussian user signal with the given PSD; distinct streams give
// independent users, distinct blocks independent realizations.
inline TimeSeries generate_user_signal(const SpectrumGrid &spectrum, std::uint64_t seed,
                                       std::uint64_t stream, std::uint64_t block = 0)
{
    const std::size_t n = spectrum.num_points();
    FftPlan plan(n);
    TimeSeries out;
    out.sample_rate = double(n) * spectrum.freq_step / (2.0 * M_PI);
    out.seed = seed;
    out.samples = spectral_draw(spectrum, seed, stream, block);
    centered_inverse(plan, out.samples);
    return out;
}

// Amplifier input at antenna n of array m: each user signal advanced by
// tau_m^(k) (frequency-domain phase ramp on the circular block), rotated
// by e^{j(phi_m^(k) n + psi_m^(k))}, scaled by sqrt(p_k), and summed.
inline TimeSeries synthesize_pa_input(const std::vector<TimeSeries> &user_signals,
                                      const MfWeights &weights,
                                      const std::vector<double> &powers, std::size_t m,
                                      std::size_t n)
{
    if (user_signals.empty() || user_signals.size() != powers.size())
        throw config_error("user signals and powers differ in length");
    const std::size_t len = user_signals[0].length();
    const double fs = user_signals[0].sample_rate;
    FftPlan plan(len);

    TimeSeries out;
    out.sample_rate = fs;
    out.seed = user_signals[0].seed;
    out.samples.assign(len, 0.0);
    std::vector<cdouble> acc(len, 0.0);
    std::vector<cdouble> work(len);

    for (std::size_t k = 0; k < user_signals.size(); ++k)
    {
        const TimeSeries &s = user_signals[k];
        if (s.length() != len)
            throw config_error("user signal blocks differ in length");
        const MfWeight &w = weights.at(m, k);
        if (std::abs(w.advance) > double(len) / fs)
            throw aliasing_error("time advance exceeds the block duration");
        work = s.samples;
        centered_forward(plan, work);
        const cdouble rot = std::polar(std::sqrt(powers[k]), w.phi * double(n) + w.psi);
        const double dw = 2.0 * M_PI * fs / double(len);
        for (std::size_t i = 0; i < len; ++i)
        {
            const double omega = (double(i) - double(len) / 2.0) * dw;
            acc[i] += rot * std::polar(1.0, omega * w.advance) * work[i];
        }
    }
    centered_inverse(plan, acc);
    out.samples = std::move(acc);
    return out;
}

// One received block at the observer: every antenna's amplifier input is
// built in the frequency domain, amplified in the time domain, and folded
// into the received spectrum with the propagation gain, per-antenna phase,
// and exact delay. Superposition runs in fixed antenna order.
inline TimeSeries simulate_received_block(const Scenario &scenario, const Location &observer,
                                          const SpectrumGrid &base, std::uint64_t seed,
                                          std::uint64_t block)
{
    validate(scenario);
    const std::size_t len = base.num_points();
    const double fs = double(len) * base.freq_step / (2.0 * M_PI);
    FftPlan plan(len);
    const LinkTable links = user_links(scenario);
    const std::vector<LinkParams> obs = observer_links(scenario, observer);
    const std::size_t K = scenario.users.count();

    std::vector<std::vector<cdouble>> user_spectra(K);
    for (std::size_t k = 0; k < K; ++k)
        user_spectra[k] = spectral_draw(base, seed, k, block);

    std::vector<cdouble> received(len, 0.0);
    std::vector<cdouble> x(len);
    std::vector<std::vector<cdouble>> advanced(K);
    std::vector<cdouble> obs_ramp(len);
    for (std::size_t m = 0; m < scenario.num_arrays(); ++m)
    {
        // Delay ramps depend on the array only; hoist them out of the
        // antenna loop.
        for (std::size_t k = 0; k < K; ++k)
        {
            const double tau = links.at(m, k).tau;
            advanced[k] = user_spectra[k];
            for (std::size_t i = 0; i < len; ++i)
                advanced[k][i] *= std::polar(1.0, base.omega(i) * tau);
        }
        for (std::size_t i = 0; i < len; ++i)
            obs_ramp[i] = std::polar(1.0, -base.omega(i) * obs[m].tau);

        const int N_m = scenario.arrays[m].num_antennas;
        for (int n = 0; n < N_m; ++n)
        {
            // Amplifier input spectrum for this antenna.
            std::fill(x.begin(), x.end(), cdouble(0.0));
            for (std::size_t k = 0; k < K; ++k)
            {
                const LinkParams &u = links.at(m, k);
                const cdouble rot = std::polar(std::sqrt(scenario.users.powers[k]),
                                               u.phi * double(n) + u.psi);
                const std::vector<cdouble> &z = advanced[k];
                for (std::size_t i = 0; i < len; ++i)
                    x[i] += rot * z[i];
            }
            centered_inverse(plan, x);
            scenario.pa.apply(x);
            centered_forward(plan, x);
            // Fold into the received spectrum with channel gain and delay.
            const cdouble gain = std::polar(obs[m].beta_mag,
                                            -obs[m].psi - obs[m].phi * double(n));
            for (std::size_t i = 0; i < len; ++i)
                received[i] += gain * obs_ramp[i] * x[i];
        }
    }
    centered_inverse(plan, received);

    TimeSeries out;
    out.sample_rate = fs;
    out.seed = seed;
    out.samples = std::move(received);
    return out;
}

// Welch PSD estimate with a per-bin standard error from the scatter of the
// segment periodograms. Calibrated as a physical per-Hz density: with a
// unit sample rate, a unit-power white process returns unit density.
struct PsdEstimate
{
    SpectrumGrid psd;
    std::vector<double> std_error;
    std::size_t num_segments = 0;
};

inline PsdEstimate estimate_psd(const TimeSeries &series, const WelchConfig &cfg)
{
    validate(cfg);
    const std::size_t seg = cfg.segment_length;
    const std::size_t len = series.length();
    if (len < seg)
        throw config_error("series shorter than one Welch segment");
    const std::size_t step = std::max<std::size_t>(1, std::size_t(double(seg) * (1.0 - cfg.overlap)));
    const std::size_t num_seg = cfg.wrap ? (len / step) : ((len - seg) / step + 1);

    const std::vector<double> window = welch_window(cfg.window, seg);
    double wsum2 = 0.0;
    for (double w : window)
        wsum2 += w * w;
    const double scale = 1.0 / (series.sample_rate * wsum2);

    FftPlan plan(seg);
    std::vector<cdouble> work(seg);
    std::vector<double> mean(seg, 0.0), m2(seg, 0.0);
    for (std::size_t s = 0; s < num_seg; ++s)
    {
        const std::size_t start = s * step;
        for (std::size_t j = 0; j < seg; ++j)
            work[j] = window[j] * series.samples[(start + j) % len];
        centered_forward(plan, work);
        // Running mean and scatter per bin.
        for (std::size_t i = 0; i < seg; ++i)
        {
            const double p = std::norm(work[i]) * scale;
            const double delta = p - mean[i];
            mean[i] += delta / double(s + 1);
            m2[i] += delta * (p - mean[i]);
        }
    }

    PsdEstimate out;
    out.num_segments = num_seg;
    out.psd.freq_step = 2.0 * M_PI * series.sample_rate / double(seg);
    out.psd.values.assign(mean.begin(), mean.end());
    out.std_error.resize(seg);
    for (std::size_t i = 0; i < seg; ++i)
        out.std_error[i] = (num_seg > 1)
                               ? std::sqrt(m2[i] / double(num_seg - 1) / double(num_seg))
                               : mean[i];
    return out;
}

// Pools Welch estimates over independent blocks; the standard error comes
// from the block-to-block scatter, which is unbiased even with overlapped
// segments inside each block.
inline PsdEstimate pooled_psd(const std::vector<TimeSeries> &blocks, const WelchConfig &cfg)
{
    if (blocks.empty())
        throw config_error("at least one block is required");
    const std::size_t seg = cfg.segment_length;
    std::vector<double> mean(seg, 0.0), m2(seg, 0.0);
    PsdEstimate out;
    std::size_t total_segments = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b)
    {
        PsdEstimate e = estimate_psd(blocks[b], cfg);
        total_segments += e.num_segments;
        if (b == 0)
            out.psd.freq_step = e.psd.freq_step;
        for (std::size_t i = 0; i < seg; ++i)
        {
            const double p = e.psd.values[i].real();
            const double delta = p - mean[i];
            mean[i] += delta / double(b + 1);
            m2[i] += delta * (p - mean[i]);
        }
    }
    const std::size_t nb = blocks.size();
    out.num_segments = total_segments;
    out.psd.values.assign(mean.begin(), mean.end());
    out.std_error.resize(seg);
    for (std::size_t i = 0; i < seg; ++i)
        out.std_error[i] =
            (nb > 1) ? std::sqrt(m2[i] / double(nb - 1) / double(nb)) : mean[i];
    return out;
}

// Expected value of the Welch estimate for a known PSD: the true density
// convolved with the window's squared-magnitude kernel and resampled onto
// the coarse segment grid. fine_psd must live on the simulation grid (its
// span equals the sample rate).
inline SpectrumGrid welch_expected(const SpectrumGrid &fine_psd, const WelchConfig &cfg)
{
    validate(cfg);
    const std::size_t nf = fine_psd.num_points();
    const std::size_t seg = cfg.segment_length;
    if (nf % seg != 0)
        throw config_error("fine grid size must be a multiple of the Welch segment length");

    const std::vector<double> window = welch_window(cfg.window, seg);
    double wsum2 = 0.0;
    for (double w : window)
        wsum2 += w * w;

    // Kernel |W(f_d)|^2 on the fine grid, standard (difference) indexing.
    FftPlan plan(nf);
    std::vector<cdouble> kernel(nf, 0.0);
    for (std::size_t j = 0; j < seg; ++j)
        kernel[j] = window[j];
    plan.forward(kernel);
    for (cdouble &v : kernel)
        v = std::norm(v);

    // Circular convolution with the density, also in standard indexing.
    std::vector<cdouble> dens(nf);
    for (std::size_t s = 0; s < nf; ++s)
        dens[s] = fine_psd.values[(s + nf / 2) % nf].real();
    plan.forward(dens);
    plan.forward(kernel);
    for (std::size_t i = 0; i < nf; ++i)
        dens[i] *= kernel[i];
    plan.inverse(dens);

    SpectrumGrid out;
    out.freq_step = fine_psd.freq_step * double(nf) / double(seg);
    out.values.resize(seg);
    const double scale = 1.0 / (double(nf) * wsum2);
    const std::ptrdiff_t ratio = std::ptrdiff_t(nf / seg);
    for (std::size_t i = 0; i < seg; ++i)
    {
        const std::ptrdiff_t offset = (std::ptrdiff_t(i) - std::ptrdiff_t(seg / 2)) * ratio;
        const std::size_t centered = std::size_t(std::ptrdiff_t(nf / 2) + offset);
        const std::size_t std_idx = (centered + nf / 2) % nf;
        out.values[i] = dens[std_idx].real() * scale;
    }
    return out;
}

// Moment-projection fit of the amplifier's output-correlation coefficients
// from samples of a CN(0, sigma2) input pushed through the amplifier. The
// two projections are orthogonal for Gaussian inputs:
//   a1 = E[y x*] / s2          -> b1 + 2 sigma2 b3,
//   a3 = E[y x* (|x|^2 - 2 s2)] / (2 s2^3) -> b3,
// with s2 the empirical input power, so c1 = |a1|^2 and c3 = 2 |a3|^2.
struct PaFit
{
    double c1 = 0.0;
    double c3 = 0.0;
};

inline PaFit fit_output_coefficients(const PaModel &pa, double sigma2,
                                     std::size_t num_samples, std::uint64_t seed)
{
    if (num_samples == 0)
        throw config_error("coefficient fit needs at least one sample");
    const double amp = std::sqrt(sigma2);
    double s2 = 0.0;
    cdouble yx = 0.0;
    cdouble yxm = 0.0;
    for (std::size_t i = 0; i < num_samples; ++i)
    {
        const cdouble x = amp * rng::cgauss(seed, 0, i);
        const cdouble y = pa.apply(x);
        const double p = std::norm(x);
        s2 += p;
        yx += y * std::conj(x);
        yxm += y * std::conj(x) * p;
    }
    const double inv = 1.0 / double(num_samples);
    s2 *= inv;
    yx *= inv;
    yxm *= inv;
    const cdouble a1 = yx / s2;
    const cdouble a3 = (yxm - 2.0 * s2 * yx) / (2.0 * s2 * s2 * s2);
    PaFit fit;
    fit.c1 = std::norm(a1);
    fit.c3 = 2.0 * std::norm(a3);
    return fit;
}

// End-to-end comparison of the time-domain simulation against the analytic
// engine at one observer. The analytic PSD is computed on the simulation
// grid and convolved with the Welch window kernel (the estimator's exact
// expectation); the empirical estimate pools independent blocks, with the
// standard error taken from the block-to-block scatter.
struct BinComparison
{
    double freq_offset_hz = 0.0;
    double expected = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    bool in_band = false;
    bool shoulder = false;
    double rel_error = 0.0;
};

struct ValidationReport
{
    std::vector<BinComparison> bins;
    std::size_t num_blocks = 0;
    std::size_t total_samples = 0;
    double worst_inband_rel = 0.0;
    double worst_shoulder_rel = 0.0;
    bool pass = false;
};

inline ValidationReport validate_scenario_psd(const Scenario &scenario,
                                              const Location &observer,
                                              const SpectrumGrid &base, std::size_t num_blocks,
                                              const WelchConfig &cfg, std::uint64_t seed,
                                              double inband_tol, double shoulder_tol)
{
    if (num_blocks < 2)
        throw config_error("validation needs at least two blocks");
    const SpectrumGrid fine = received_psd_general(scenario, observer, base);
    const SpectrumGrid expected = welch_expected(fine, cfg);
    const std::size_t seg = cfg.segment_length;

    // Pool per-block Welch estimates with running mean and scatter.
    std::vector<double> mean(seg, 0.0), m2(seg, 0.0);
    for (std::size_t b = 0; b < num_blocks; ++b)
    {
        const TimeSeries block = simulate_received_block(scenario, observer, base, seed, b);
        const PsdEstimate est = estimate_psd(block, cfg);
        for (std::size_t i = 0; i < seg; ++i)
        {
            const double p = est.psd.values[i].real();
            const double delta = p - mean[i];
            mean[i] += delta / double(b + 1);
            m2[i] += delta * (p - mean[i]);
        }
    }

    double peak = 0.0;
    for (std::size_t i = 0; i < seg; ++i)
        peak = std::max(peak, expected.values[i].real());
    const double band_edge = scenario.pulse.bandwidth * (1.0 + scenario.pulse.rolloff) / 2.0;

    ValidationReport report;
    report.num_blocks = num_blocks;
    report.total_samples = num_blocks * base.num_points();
    report.bins.resize(seg);
    bool ok = true;
    for (std::size_t i = 0; i < seg; ++i)
    {
        BinComparison &bin = report.bins[i];
        bin.freq_offset_hz = expected.omega(i) / (2.0 * M_PI);
        bin.expected = expected.values[i].real();
        bin.empirical = mean[i];
        bin.std_error = std::sqrt(m2[i] / double(num_blocks - 1) / double(num_blocks));
        const double af = std::abs(bin.freq_offset_hz);
        bin.in_band = af <= band_edge;
        bin.shoulder = !bin.in_band && bin.expected >= 1e-3 * peak;
        if (bin.in_band || bin.shoulder)
        {
            bin.rel_error = std::abs(bin.empirical - bin.expected) / bin.expected;
            if (bin.in_band)
            {
                report.worst_inband_rel = std::max(report.worst_inband_rel, bin.rel_error);
                ok = ok && bin.rel_error <= inband_tol;
            }
            else
            {
                report.worst_shoulder_rel = std::max(report.worst_shoulder_rel, bin.rel_error);
                ok = ok && bin.rel_error <= shoulder_tol;
            }
        }
    }
    report.pass = ok;
    return report;
}

} // namespace beamspot

#endif
