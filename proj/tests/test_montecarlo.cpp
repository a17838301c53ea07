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

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <algorithm>
#include <numeric>

using namespace beamspot;
using testsup::circular_cross_corr;
using testsup::Draw;
using testsup::LagStat;

namespace
{

SpectrumGrid white_spectrum(std::size_t n, double sample_rate, double density)
{
    SpectrumGrid s;
    s.freq_step = 2.0 * M_PI * sample_rate / double(n);
    s.values.assign(n, density);
    return s;
}

double window_sum(const std::vector<double> &w)
{
    return std::accumulate(w.begin(), w.end(), 0.0);
}

double window_energy(const std::vector<double> &w)
{
    double acc = 0.0;
    for (double v : w)
        acc += v * v;
    return acc;
}

double pearson(const std::vector<double> &a, const std::vector<double> &b)
{
    const double n = double(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("user signal generation is deterministic and block-indexed", "[montecarlo]")
{
    const SpectrumGrid base = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, 1024, 80e6);
    const TimeSeries a = generate_user_signal(base, 77, 3, 5);
    const TimeSeries b = generate_user_signal(base, 77, 3, 5);
    REQUIRE(a.sample_rate == 80e6);
    REQUIRE(a.seed == 77);
    REQUIRE(a.length() == 1024);
    for (std::size_t i = 0; i < a.length(); ++i)
        REQUIRE(a.samples[i] == b.samples[i]);

    const TimeSeries c = generate_user_signal(base, 77, 3, 6);
    bool differs = false;
    for (std::size_t i = 0; i < a.length(); ++i)
        differs = differs || a.samples[i] != c.samples[i];
    REQUIRE(differs);
}

TEST_CASE("spectral draw clamps negative densities and follows the counter layout",
          "[montecarlo]")
{
    SpectrumGrid s = white_spectrum(16, 4.0, 1.0);
    s.values[5] = -0.25;
    const std::vector<cdouble> z = spectral_draw(s, 9, 2, 3);
    REQUIRE(z[5] == cdouble(0.0));
    const double sigma = std::sqrt(16.0 * 4.0 * 1.0);
    for (std::size_t i = 0; i < 16; ++i)
    {
        if (i == 5)
            continue;
        REQUIRE(z[i] == sigma * rng::cgauss(9, 2, 3 * 16 + i));
    }
}

TEST_CASE("white input returns flat unit density from the averaged periodogram",
          "[montecarlo]")
{
    const std::size_t n = 2048;
    const SpectrumGrid white = white_spectrum(n, 1.0, 1.0);
    WelchConfig cfg;
    cfg.segment_length = 256;
    cfg.overlap = 0.5;
    cfg.wrap = true;

    std::vector<TimeSeries> blocks;
    for (std::uint64_t b = 0; b < 16; ++b)
        blocks.push_back(generate_user_signal(white, 0x5eedca11, 0, b));
    const PsdEstimate est = pooled_psd(blocks, cfg);
    REQUIRE(est.num_segments == 16 * (n / 128));

    double grand = 0.0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
    {
        const double v = est.psd.values[i].real();
        REQUIRE(std::abs(v - 1.0) <= 5.0 * est.std_error[i]);
        grand += v;
    }
    grand /= double(cfg.segment_length);
    REQUIRE(std::abs(grand - 1.0) < 0.02);
}

TEST_CASE("a tone at a bin center produces the calibrated single-bin height",
          "[montecarlo]")
{
    const std::size_t n = 2048, seg = 256;
    const double fs = 1.0, amp = 1.3;
    TimeSeries tone;
    tone.sample_rate = fs;
    tone.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        tone.samples[t] = amp * std::polar(1.0, 2.0 * M_PI * double(t) / 32.0);

    WelchConfig cfg;
    cfg.segment_length = seg;
    cfg.overlap = 0.5;
    cfg.wrap = true;
    const PsdEstimate est = estimate_psd(tone, cfg);

    const std::vector<double> w = welch_window(cfg.window, seg);
    const double expected = amp * amp * window_sum(w) * window_sum(w) /
                            (fs * window_energy(w));
    const std::size_t peak_bin = seg / 2 + 8;
    REQUIRE(std::abs(est.psd.values[peak_bin].real() - expected) <= 1e-9 * expected);
    for (std::size_t i = 0; i < seg; ++i)
    {
        const long off = std::labs(long(i) - long(peak_bin));
        if (off > 4)
            REQUIRE(est.psd.values[i].real() <= 1e-8 * expected);
    }
}

TEST_CASE("generated signals carry the target power and circular symmetry",
          "[montecarlo]")
{
    const SpectrumGrid base = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, 32768, 80e6);
    const double r0 = autocorrelation(base).at_zero().real();
    const TimeSeries s = generate_user_signal(base, 0x5eedbeef, 0);

    const LagStat power = circular_cross_corr(s.samples, s.samples, 0, 32);
    REQUIRE(std::abs(power.mean.real() - r0) <= 3.5 * power.std_error);

    std::vector<cdouble> conj_s(s.samples.size());
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        conj_s[i] = std::conj(s.samples[i]);
    const LagStat pseudo = circular_cross_corr(s.samples, conj_s, 0, 32);
    REQUIRE(std::abs(pseudo.mean) <= 3.5 * pseudo.std_error);

    const TimeSeries other = generate_user_signal(base, 0x5eedbeef, 1);
    for (long lag : {0L, 5L})
    {
        const LagStat cross = circular_cross_corr(s.samples, other.samples, lag, 32);
        REQUIRE(std::abs(cross.mean) <= 3.5 * cross.std_error);
    }
}

TEST_CASE("the averaged periodogram recovers a shaped target spectrum", "[montecarlo]")
{
    const std::size_t n = 4096;
    const SpectrumGrid base = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, n, 80e6);
    WelchConfig cfg;
    cfg.segment_length = 512;
    cfg.overlap = 0.5;
    cfg.wrap = true;

    std::vector<TimeSeries> blocks;
    for (std::uint64_t b = 0; b < 16; ++b)
        blocks.push_back(generate_user_signal(base, 0x0bb1e5, 0, b));
    const PsdEstimate est = pooled_psd(blocks, cfg);
    const SpectrumGrid expected = welch_expected(base, cfg);

    double peak = 0.0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
        peak = std::max(peak, expected.values[i].real());

    std::size_t tested = 0, within3 = 0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
    {
        const double e = expected.values[i].real();
        if (e < 1e-3 * peak)
            continue;
        ++tested;
        const double gap = std::abs(est.psd.values[i].real() - e);
        REQUIRE(gap <= 6.0 * est.std_error[i]);
        if (gap <= 3.0 * est.std_error[i])
            ++within3;
    }
    REQUIRE(tested > 60);
    REQUIRE(double(within3) >= 0.9 * double(tested));

    double total = 0.0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
        total += est.psd.values[i].real();
    total *= est.psd.freq_step / (2.0 * M_PI);
    REQUIRE(std::abs(total - 1.0) < 0.02);
}

TEST_CASE("precoding with neutral weights reproduces the user signal", "[montecarlo]")
{
    const SpectrumGrid base = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, 1024, 80e6);
    const TimeSeries s = generate_user_signal(base, 11, 0);

    LinkTable table(1, 1);
    LinkParams lp;
    lp.beta_mag = 1.0;
    lp.psi = 0.0;
    lp.tau = 0.0;
    lp.phi = 0.7;
    table.at(0, 0) = lp;
    const MfWeights w = mf_weights(table);

    const TimeSeries x = synthesize_pa_input({s}, w, {1.0}, 0, 0);
    double peak = 0.0;
    for (const cdouble &v : s.samples)
        peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < s.length(); ++i)
        REQUIRE(std::abs(x.samples[i] - s.samples[i]) <= 1e-12 * peak);
}

TEST_CASE("every amplifier input carries the same analytic power", "[montecarlo]")
{
    Draw draw(0x5eed0701, 0);
    const Scenario sc = testsup::random_scenario(draw, 2, 2, 4);
    const std::size_t n = 16384;
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, n, 80e6);
    const double sigma2 = pa_input_power(sc.users, autocorrelation(base));
    const MfWeights w = mf_weights(user_links(sc));

    std::vector<TimeSeries> signals;
    for (std::uint64_t k = 0; k < 2; ++k)
        signals.push_back(generate_user_signal(base, 0xfeed01, k));

    const std::pair<std::size_t, std::size_t> taps[] = {{0, 1}, {1, 3}};
    for (const auto &[m, ant] : taps)
    {
        const TimeSeries x = synthesize_pa_input(signals, w, sc.users.powers, m, ant);
        const LagStat power = circular_cross_corr(x.samples, x.samples, 0, 32);
        REQUIRE(std::abs(power.mean.real() - sigma2) <= 3.5 * power.std_error);
    }
}

TEST_CASE("synthesized antenna streams match the analytic cross-correlation",
          "[montecarlo]")
{
    Draw draw(0x5eed0702, 0);
    const Scenario sc = testsup::random_scenario(draw, 2, 2, 4);
    const std::size_t n = 32768;
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, n, 80e6);
    const CorrelationGrid corr = autocorrelation(base);
    const LinkTable links = user_links(sc);
    const MfWeights w = mf_weights(links);

    std::vector<TimeSeries> signals;
    for (std::uint64_t k = 0; k < 2; ++k)
        signals.push_back(generate_user_signal(base, 0xfeed02, k));
    const TimeSeries x1 = synthesize_pa_input(signals, w, sc.users.powers, 0, 1);
    const TimeSeries x2 = synthesize_pa_input(signals, w, sc.users.powers, 1, 2);

    const CorrelationGrid analytic =
        input_cross_correlation(0, 1, 1, 2, sc.users, links, corr);
    for (long lag = -8; lag < 8; ++lag)
    {
        const LagStat stat = circular_cross_corr(x1.samples, x2.samples, lag, 64);
        const cdouble ref = analytic.values[std::size_t(long(n / 2) + lag)];
        REQUIRE(std::abs(stat.mean - ref) <= 3.5 * stat.std_error);
    }
}

TEST_CASE("a linear amplifier combines coherently at the served user", "[montecarlo]")
{
    Scenario sc;
    sc.carrier = CarrierConfig{1e9, speed_of_light_mps, 2.0, 1.0};
    const double lambda = wavelength(sc.carrier);
    sc.arrays.push_back(ArrayDescriptor{Vec2{0.0, 0.0}, 0.3, 3, lambda / 2.0});
    sc.arrays.push_back(ArrayDescriptor{Vec2{40.0, -30.0}, 1.2, 5, lambda / 2.0});
    sc.users.locations.push_back(Location{Vec2{150.0, 80.0}});
    sc.users.powers.push_back(1.3);
    sc.pa.b1 = cdouble(0.8, 0.6);
    sc.pa.b3 = 0.0;
    sc.pulse = PulseSpec{10e6, 0.22};

    const std::size_t n = 32768;
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, n, 80e6);
    const double r0 = autocorrelation(base).at_zero().real();
    const LinkTable links = user_links(sc);
    double gain_sum = 0.0;
    for (std::size_t m = 0; m < sc.num_arrays(); ++m)
        gain_sum += links.at(m, 0).beta_mag * double(sc.arrays[m].num_antennas);
    const double expected = 1.3 * r0 * std::norm(sc.pa.b1) * gain_sum * gain_sum;

    const TimeSeries r =
        simulate_received_block(sc, sc.users.locations[0], base, 0xcafe01, 0);
    const LagStat power = circular_cross_corr(r.samples, r.samples, 0, 32);
    REQUIRE(std::abs(power.mean.real() - expected) <= 3.5 * power.std_error);
}

TEST_CASE("a single linear antenna scales the spectrum by the channel gain",
          "[montecarlo]")
{
    Scenario sc;
    sc.carrier = CarrierConfig{1e9, speed_of_light_mps, 2.0, 1.0};
    sc.arrays.push_back(ArrayDescriptor{Vec2{0.0, 0.0}, 0.0, 1, 0.15});
    sc.users.locations.push_back(Location{Vec2{120.0, 50.0}});
    sc.users.powers.push_back(1.0);
    sc.pa.b1 = cdouble(0.9, -0.2);
    sc.pa.b3 = 0.0;
    sc.pulse = PulseSpec{10e6, 0.22};

    const std::size_t n = 8192;
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, n, 80e6);
    const double beta = user_links(sc).at(0, 0).beta_mag;
    SpectrumGrid fine = base;
    for (cdouble &v : fine.values)
        v *= std::norm(sc.pa.b1) * beta * beta;

    WelchConfig cfg;
    cfg.segment_length = 512;
    cfg.overlap = 0.5;
    cfg.wrap = true;
    const SpectrumGrid expected = welch_expected(fine, cfg);

    std::vector<TimeSeries> blocks;
    for (std::uint64_t b = 0; b < 12; ++b)
        blocks.push_back(simulate_received_block(sc, sc.users.locations[0], base,
                                                 0xcafe02, b));
    const PsdEstimate est = pooled_psd(blocks, cfg);

    double peak = 0.0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
        peak = std::max(peak, expected.values[i].real());
    std::size_t tested = 0, within3 = 0;
    for (std::size_t i = 0; i < cfg.segment_length; ++i)
    {
        const double e = expected.values[i].real();
        if (e < 1e-3 * peak)
            continue;
        ++tested;
        const double gap = std::abs(est.psd.values[i].real() - e);
        REQUIRE(gap <= 6.0 * est.std_error[i]);
        if (gap <= 3.0 * est.std_error[i])
            ++within3;
    }
    REQUIRE(tested > 60);
    REQUIRE(double(within3) >= 0.9 * double(tested));
}

TEST_CASE("the simulated receiver is deterministic per block index", "[montecarlo]")
{
    Draw draw(0x5eed0703, 0);
    const Scenario sc = testsup::random_scenario(draw, 2, 2, 2);
    const Location obs = testsup::random_observer(draw, sc);
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, 1024, 80e6);

    const TimeSeries a = simulate_received_block(sc, obs, base, 5, 2);
    const TimeSeries b = simulate_received_block(sc, obs, base, 5, 2);
    for (std::size_t i = 0; i < a.length(); ++i)
        REQUIRE(a.samples[i] == b.samples[i]);

    const TimeSeries c = simulate_received_block(sc, obs, base, 5, 3);
    bool differs = false;
    for (std::size_t i = 0; i < a.length(); ++i)
        differs = differs || a.samples[i] != c.samples[i];
    REQUIRE(differs);
}

TEST_CASE("the end-to-end validation report matches the analytic engine",
          "[montecarlo]")
{
    Draw draw(0x5eed0704, 0);
    const Scenario sc = testsup::random_scenario(draw, 2, 2, 2);
    const Location obs = testsup::random_observer(draw, sc);
    const std::size_t n = 16384;
    const SpectrumGrid base = raised_cosine_spectrum(sc.pulse, n, 80e6);

    const double extent = 3.0 * sc.pulse.bandwidth * (1.0 + sc.pulse.rolloff) / 2.0;
    REQUIRE(80e6 >= 2.0 * extent);

    WelchConfig cfg;
    cfg.segment_length = 512;
    cfg.overlap = 0.5;
    cfg.wrap = true;
    const ValidationReport report =
        validate_scenario_psd(sc, obs, base, 16, cfg, 0xcafe03, 0.2, 0.45);

    REQUIRE(report.num_blocks == 16);
    REQUIRE(report.total_samples == 16 * n);
    REQUIRE(report.bins.size() == 512);
    REQUIRE(report.pass);
    REQUIRE(report.worst_inband_rel <= 0.2);
    bool saw_inband = false, saw_shoulder = false;
    for (const BinComparison &bin : report.bins)
    {
        saw_inband = saw_inband || bin.in_band;
        saw_shoulder = saw_shoulder || bin.shoulder;
    }
    REQUIRE(saw_inband);
    REQUIRE(saw_shoulder);
}

TEST_CASE("moment fitting recovers the output correlation coefficients",
          "[montecarlo]")
{
    PaModel pa;
    pa.b1 = 1.0;
    pa.b3 = -0.1;
    const PaFit fit = fit_output_coefficients(pa, 1.0, 200000, 0xf17ce);
    REQUIRE(std::abs(fit.c1 - 0.64) <= 0.03 * 0.64);
    REQUIRE(std::abs(fit.c3 - 0.02) <= 0.10 * 0.02);
    REQUIRE_THROWS_AS(fit_output_coefficients(pa, 1.0, 0, 1), config_error);
}

TEST_CASE("the expected periodogram of a flat density is flat", "[montecarlo]")
{
    const SpectrumGrid white = white_spectrum(4096, 1.0, 0.7);
    WelchConfig cfg;
    cfg.segment_length = 256;
    const SpectrumGrid expected = welch_expected(white, cfg);
    REQUIRE(expected.num_points() == 256);
    for (const cdouble &v : expected.values)
        REQUIRE(std::abs(v.real() - 0.7) <= 1e-9);

    SpectrumGrid doubled = white;
    for (cdouble &v : doubled.values)
        v *= 2.0;
    const SpectrumGrid exp2 = welch_expected(doubled, cfg);
    for (std::size_t i = 0; i < 256; ++i)
        REQUIRE(std::abs(exp2.values[i].real() - 2.0 * expected.values[i].real()) <=
                1e-12);
}

TEST_CASE("estimation rejects invalid configurations", "[montecarlo]")
{
    TimeSeries s;
    s.sample_rate = 1.0;
    s.samples.assign(128, cdouble(1.0));

    WelchConfig cfg;
    cfg.segment_length = 256;
    REQUIRE_THROWS_AS(estimate_psd(s, cfg), config_error);

    cfg.segment_length = 100;
    REQUIRE_THROWS_AS(estimate_psd(s, cfg), config_error);

    cfg.segment_length = 64;
    cfg.overlap = 0.95;
    REQUIRE_THROWS_AS(estimate_psd(s, cfg), config_error);

    cfg.overlap = 0.5;
    REQUIRE_THROWS_AS(pooled_psd({}, cfg), config_error);

    const SpectrumGrid fine = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, 1024, 80e6);
    cfg.segment_length = 100;
    REQUIRE_THROWS_AS(welch_expected(fine, cfg), config_error);
    cfg.segment_length = 2048;
    REQUIRE_THROWS_AS(welch_expected(fine, cfg), config_error);

    Draw draw(0x5eed0705, 0);
    const Scenario sc = testsup::random_scenario(draw, 1, 1, 2);
    cfg.segment_length = 256;
    REQUIRE_THROWS_AS(
        validate_scenario_psd(sc, sc.users.locations[0], fine, 1, cfg, 1, 0.1, 0.3),
        config_error);
}

TEST_CASE("synthesis rejects mismatched streams and oversized delays", "[montecarlo]")
{
    const SpectrumGrid base = raised_cosine_spectrum(PulseSpec{10e6, 0.22}, 256, 80e6);
    const TimeSeries s = generate_user_signal(base, 1, 0);

    LinkTable table(1, 1);
    LinkParams lp;
    lp.beta_mag = 1.0;
    table.at(0, 0) = lp;
    const MfWeights w = mf_weights(table);
    REQUIRE_THROWS_AS(synthesize_pa_input({s, s}, w, {1.0}, 0, 0), config_error);
    REQUIRE_THROWS_AS(synthesize_pa_input({}, w, {}, 0, 0), config_error);

    LinkTable far(1, 1);
    lp.tau = 1.0;
    far.at(0, 0) = lp;
    const MfWeights wf = mf_weights(far);
    REQUIRE_THROWS_AS(synthesize_pa_input({s}, wf, {1.0}, 0, 0), aliasing_error);
}

TEST_CASE("many equal arrays drive the field amplitude toward Rayleigh",
          "[montecarlo]")
{
    Scenario sc;
    sc.carrier = CarrierConfig{1e9, speed_of_light_mps, 2.0, 1.0};
    const double lambda = wavelength(sc.carrier);
    for (int m = 0; m < 16; ++m)
    {
        const double ang = 2.0 * M_PI * double(m) / 16.0;
        sc.arrays.push_back(ArrayDescriptor{
            Vec2{300.0 * std::cos(ang), 300.0 * std::sin(ang)}, 0.0, 1, lambda / 2.0});
    }
    sc.users.locations.push_back(Location{Vec2{40.0, 10.0}});
    sc.users.powers.push_back(1.0);
    sc.pulse = PulseSpec{10e6, 0.22};

    const LinkTable links = user_links(sc);
    std::vector<double> amplitude;
    Draw draw(0x4a11e4, 0);
    while (amplitude.size() < 10000)
    {
        const double rad = 60.0 * std::sqrt(draw.uniform());
        const double ang = draw.angle();
        const Location obs{Vec2{rad * std::cos(ang), rad * std::sin(ang)}};
        if (distance(obs.position, sc.users.locations[0].position) < 2.0)
            continue;
        const std::vector<LinkParams> ol = observer_links(sc, obs);
        cdouble field = 0.0;
        for (std::size_t m = 0; m < ol.size(); ++m)
            field += ol[m].beta_mag * std::polar(1.0, links.at(m, 0).psi - ol[m].psi);
        amplitude.push_back(std::abs(field));
    }

    std::sort(amplitude.begin(), amplitude.end());
    std::vector<double> quantile(amplitude.size());
    for (std::size_t i = 0; i < amplitude.size(); ++i)
    {
        const double q = (double(i) + 0.5) / double(amplitude.size());
        quantile[i] = std::sqrt(-2.0 * std::log(1.0 - q));
    }
    REQUIRE(pearson(amplitude, quantile) >= 0.99);
}
