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

using namespace beamspot;
using testsup::Draw;

namespace
{

CorrelationGrid base_correlation(std::size_t n = 2048)
{
    return autocorrelation(raised_cosine_spectrum(PulseSpec{10e6, 0.22}, n, 80e6));
}

}  // namespace

TEST_CASE("matched weights advance by the link delay and conjugate its phases",
          "[precoder]")
{
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0501, c);
        const Scenario sc = testsup::random_scenario(draw, 3, 2, 4);
        const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
        const MfWeights weights = mf_weights(links);
        for (std::size_t m = 0; m < 2; ++m)
            for (std::size_t k = 0; k < 3; ++k)
            {
                const LinkParams &link = links.at(m, k);
                REQUIRE(weights.at(m, k).advance == link.tau);
                REQUIRE(weights.at(m, k).psi == link.psi);
                REQUIRE(weights.at(m, k).phi == link.phi);
                for (int n = 0; n < 4; ++n)
                    REQUIRE(std::abs(weights.phase(m, std::size_t(n), k) -
                                     std::polar(1.0, link.phi * double(n) + link.psi)) <
                            1e-15);
            }
    }
}

TEST_CASE("amplifier drive power is the sum of user powers", "[precoder]")
{
    const CorrelationGrid corr = base_correlation();
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0502, c);
        UserSet users;
        const std::size_t K = std::size_t(draw.integer(1, 6));
        double expect = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            users.locations.push_back(Location{Vec2{draw.range(-100, 100), draw.range(-100, 100)}});
            users.powers.push_back(draw.range(0.1, 3.0));
            expect += users.powers.back();
        }
        expect *= corr.at_zero().real();
        REQUIRE(pa_input_power(users, corr) == Catch::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("every antenna sees the same drive power", "[precoder]")
{
    const CorrelationGrid corr = base_correlation();
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0503, c);
        const Scenario sc =
            testsup::random_scenario(draw, std::size_t(draw.integer(1, 3)),
                                     std::size_t(draw.integer(1, 3)), 3);
        const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
        const double sigma2 = pa_input_power(sc.users, corr);
        for (std::size_t m = 0; m < sc.num_arrays(); ++m)
            for (std::size_t n = 0; n < 3; ++n)
            {
                const CorrelationGrid diag =
                    input_cross_correlation(m, n, m, n, sc.users, links, corr);
                REQUIRE(std::abs(diag.at_zero().real() - sigma2) < 1e-12 * sigma2);
                REQUIRE(std::abs(diag.at_zero().imag()) < 1e-12 * sigma2);
            }
    }
}

TEST_CASE("cross-correlations are Hermitian under pair swap and lag reversal",
          "[precoder]")
{
    const CorrelationGrid corr = base_correlation();
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0504, c);
        const Scenario sc = testsup::random_scenario(draw, 2, 2, 3);
        const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
        const std::size_t m = std::size_t(draw.integer(0, 1));
        const std::size_t m2 = std::size_t(draw.integer(0, 1));
        const std::size_t n = std::size_t(draw.integer(0, 2));
        const std::size_t n2 = std::size_t(draw.integer(0, 2));
        const CorrelationGrid fwd =
            input_cross_correlation(m, n, m2, n2, sc.users, links, corr);
        const CorrelationGrid rev =
            input_cross_correlation(m2, n2, m, n, sc.users, links, corr);
        const double sigma2 = pa_input_power(sc.users, corr);
        const std::size_t len = fwd.num_points();
        for (std::size_t j = 1; j < len; j += 7)
            REQUIRE(std::abs(fwd.values[j] - std::conj(rev.values[len - j])) <
                    1e-12 * sigma2);
    }
}

TEST_CASE("correlation magnitude never exceeds the drive power", "[precoder]")
{
    const CorrelationGrid corr = base_correlation();
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0505, c);
        const Scenario sc =
            testsup::random_scenario(draw, std::size_t(draw.integer(1, 4)), 2, 4);
        const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
        const double sigma2 = pa_input_power(sc.users, corr);
        const std::size_t m = std::size_t(draw.integer(0, 1));
        const std::size_t m2 = std::size_t(draw.integer(0, 1));
        const std::size_t n = std::size_t(draw.integer(0, 3));
        const std::size_t n2 = std::size_t(draw.integer(0, 3));
        const CorrelationGrid grid =
            input_cross_correlation(m, n, m2, n2, sc.users, links, corr);
        for (const cdouble &v : grid.values)
            REQUIRE(std::abs(v) <= sigma2 * (1.0 + 1e-9));
    }
}

TEST_CASE("single-user streams are fully coherent at the compensating lag",
          "[precoder]")
{
    const CorrelationGrid corr = base_correlation();
    for (std::uint64_t c = 0; c < 100; ++c)
    {
        Draw draw(0x5eed0506, c);
        const Scenario sc = testsup::random_scenario(draw, 1, 2, 4);
        const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
        const double p = sc.users.powers[0];
        const double r0 = corr.at_zero().real();

        // Same array: antennas share the delay, so the peak sits at lag zero.
        const CorrelationGrid same =
            input_cross_correlation(0, 0, 0, 3, sc.users, links, corr);
        REQUIRE(std::abs(std::abs(same.at_zero()) - p * r0) < 1e-9);

        // Across arrays the peak sits at the delay difference; undo it and
        // read the center of the grid.
        const double delta = links.at(0, 0).tau - links.at(1, 0).tau;
        const CorrelationGrid cross =
            input_cross_correlation(0, 1, 1, 2, sc.users, links, corr);
        const CorrelationGrid recentred = shift_correlation(cross, -delta);
        REQUIRE(std::abs(std::abs(recentred.at_zero()) - p * r0) < 1e-6);
    }
}

TEST_CASE("analytic cross-correlation matches synthesized streams", "[precoder]")
{
    // Fixed two-user scenario; the time-domain streams come from the same
    // weight table the analytic formula uses.
    Draw draw(0x5eed0507, 0);
    const Scenario sc = testsup::random_scenario(draw, 2, 2, 4);
    const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
    const MfWeights weights = mf_weights(links);

    const std::size_t len = 32768;
    const SpectrumGrid sim = raised_cosine_spectrum(sc.pulse, len, 80e6);
    const CorrelationGrid corr = autocorrelation(sim);

    std::vector<TimeSeries> signals;
    for (std::size_t k = 0; k < 2; ++k)
        signals.push_back(generate_user_signal(sim, 0x5eed0508, k));

    const TimeSeries xa = synthesize_pa_input(signals, weights, sc.users.powers, 0, 1);
    const TimeSeries xb = synthesize_pa_input(signals, weights, sc.users.powers, 1, 3);

    const CorrelationGrid analytic =
        input_cross_correlation(0, 1, 1, 3, sc.users, links, corr);

    for (long lag = -8; lag < 8; ++lag)
    {
        const testsup::LagStat got =
            testsup::circular_cross_corr(xa.samples, xb.samples, lag, 64);
        const cdouble expect = analytic.values[std::size_t(long(len / 2) + lag)];
        REQUIRE(std::abs(got.mean - expect) < 3.0 * got.std_error);
    }
}

TEST_CASE("advances beyond the lag window are rejected", "[precoder]")
{
    // A short window cannot hold the delay spread of a very deep scenario.
    const CorrelationGrid corr = base_correlation(256);
    Scenario sc;
    sc.carrier = CarrierConfig{1e9, speed_of_light_mps, 2.0, 1.0};
    const double lambda = wavelength(sc.carrier);
    sc.arrays.push_back(ArrayDescriptor{Vec2{0.0, 0.0}, 0.0, 2, lambda / 2.0});
    sc.arrays.push_back(ArrayDescriptor{Vec2{1200.0, 0.0}, 0.0, 2, lambda / 2.0});
    sc.users.locations.push_back(Location{Vec2{600.0, 1100.0}});
    sc.users.locations.push_back(Location{Vec2{-50.0, 40.0}});
    sc.users.powers = {1.0, 1.0};
    const LinkTable links = build_links(sc.arrays, sc.users, sc.carrier);
    REQUIRE_THROWS_AS(input_cross_correlation(0, 0, 1, 0, sc.users, links, corr),
                      aliasing_error);
}

TEST_CASE("user sets are validated", "[precoder]")
{
    UserSet empty;
    REQUIRE_THROWS_AS(validate(empty), config_error);

    UserSet mismatched;
    mismatched.locations.push_back(Location{Vec2{1.0, 2.0}});
    REQUIRE_THROWS_AS(validate(mismatched), config_error);

    UserSet nonpositive;
    nonpositive.locations.push_back(Location{Vec2{1.0, 2.0}});
    nonpositive.powers.push_back(0.0);
    REQUIRE_THROWS_AS(validate(nonpositive), config_error);

    UserSet good;
    good.locations.push_back(Location{Vec2{1.0, 2.0}});
    good.powers.push_back(0.5);
    REQUIRE_NOTHROW(validate(good));
}
