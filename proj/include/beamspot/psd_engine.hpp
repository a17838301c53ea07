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

#ifndef beamspot_psd_engine_H
#define beamspot_psd_engine_H

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "pa.hpp"
#include "precoder.hpp"
#include "signals.hpp"

namespace beamspot
{

// Full downlink description: arrays, served users, amplifier, base pulse
// and carrier. Everything the analytic engine and the simulator need.
struct Scenario
{
    std::vector<ArrayDescriptor> arrays;
    UserSet users;
    PaModel pa;
    PulseSpec pulse;
    CarrierConfig carrier;

    std::size_t num_arrays() const { return arrays.size(); }
    std::size_t total_antennas() const
    {
        std::size_t acc = 0;
        for (const ArrayDescriptor &a : arrays)
            acc += std::size_t(a.num_antennas);
        return acc;
    }
};

inline void validate(const Scenario &scenario)
{
    if (scenario.arrays.empty())
        throw config_error("at least one array is required");
    for (const ArrayDescriptor &a : scenario.arrays)
    {
        if (a.num_antennas < 1)
            throw config_error("array antenna count must be >= 1");
        if (!(a.spacing > 0.0))
            throw config_error("antenna spacing must be > 0");
    }
    validate(scenario.users);
    validate(scenario.pulse);
    if (!(scenario.carrier.carrier_freq > 0.0))
        throw config_error("carrier frequency must be > 0");
    if (!(scenario.carrier.ref_distance > 0.0))
        throw config_error("reference distance must be > 0");
    if (!(scenario.carrier.path_loss_exponent >= 0.0))
        throw config_error("path loss exponent must be >= 0");
}

inline LinkTable user_links(const Scenario &scenario)
{
    return build_links(scenario.arrays, scenario.users, scenario.carrier);
}

inline std::vector<LinkParams> observer_links(const Scenario &scenario, const Location &observer)
{
    std::vector<LinkParams> links(scenario.num_arrays());
    for (std::size_t m = 0; m < links.size(); ++m)
        links[m] = compute_link(scenario.arrays[m], observer, scenario.carrier);
    return links;
}

// Dirichlet kernel D_N(phi) = sum_{n=0}^{N-1} e^{j phi n}
//                           = e^{j phi (N-1)/2} sin(N phi / 2) / sin(phi / 2).
// Near multiples of 2 pi the ratio form loses precision, so the sum is
// evaluated directly there.
inline cdouble dirichlet(int N, double phi)
{
    if (N < 1)
        throw config_error("Dirichlet kernel size must be >= 1");
    const double half = 0.5 * phi;
    const double s = std::sin(half);
    if (std::abs(s) < 1e-6)
    {
        cdouble acc = 0.0;
        for (int n = 0; n < N; ++n)
            acc += std::polar(1.0, phi * double(n));
        return acc;
    }
    return std::polar(1.0, half * double(N - 1)) * (std::sin(double(N) * half) / s);
}

// Which terms of the amplifier output correlation enter the received PSD.
enum class PsdTerms
{
    all,
    linear_only,
    cubic_only
};

// Received PSD from the full second-order model: the sum over all antenna
// pairs (m, n), (m', n') of
//   beta_m beta*_m' e^{-j(phi_m n - phi_m' n')} e^{-j w (tau_m - tau_m')}
//   FT{ R_y[(m,n),(m',n')] },
// where R_y = c1 R_x + c3 R_x |R_x|^2 and R_x is the amplifier-input
// cross-correlation. Complexity is O((sum_m N_m)^2 * grid size); antenna
// pairs whose input correlations are identical up to the per-user phase
// signature are evaluated once (within an array the signature depends on
// n - n' only, collapsing N^2 pairs to 2N - 1 diagonals).
inline SpectrumGrid received_psd_general(const Scenario &scenario,
                                         const std::vector<LinkParams> &obs,
                                         const SpectrumGrid &base,
                                         PsdTerms terms = PsdTerms::all)
{
    validate(scenario);
    const std::size_t M = scenario.num_arrays();
    const std::size_t K = scenario.users.count();
    if (obs.size() != M)
        throw config_error("observer links must cover every array");

    const LinkTable links = user_links(scenario);
    const std::size_t n_grid = base.num_points();
    FftPlan plan(n_grid);
    const CorrelationGrid base_corr = autocorrelation(base);
    const double sigma2 = pa_input_power(scenario.users, base_corr);
    const PaOutputCoefficients c = output_coefficients(scenario.pa, sigma2);

    // Phase signature of an antenna pair: the K per-user input phases,
    // quantized far below any physical scale.
    const auto quantize = [](double angle) {
        double r = std::fmod(angle, 2.0 * M_PI);
        if (r < 0.0)
            r += 2.0 * M_PI;
        return std::int64_t(std::llround(r * 1e12));
    };

    struct PairGroup
    {
        std::vector<double> user_phase;  // theta_k, representative member
        cdouble observer_factor = 0.0;   // sum of e^{-j(phi_m n - phi_m' n')}
    };

    std::vector<cdouble> accum(n_grid, 0.0);
    std::vector<cdouble> work(n_grid);

    // Transforms one group's input correlation through the amplifier map
    // and adds its weighted spectrum together with the conjugate mirror:
    // swapping the two antennas of a pair conjugates its contribution, so
    // only one triangle of pairs is enumerated and each term enters as
    // twice its real part.
    const auto add_group = [&](const PairGroup &group, std::size_t m, std::size_t m2,
                               const cdouble &pair_scale) {
        // Input cross-spectrum: sum_k p_k e^{j theta_k} e^{j w d tau_k} S(w).
        std::fill(work.begin(), work.end(), cdouble(0.0));
        for (std::size_t k = 0; k < K; ++k)
        {
            const double dtau = links.at(m, k).tau - links.at(m2, k).tau;
            const cdouble rot = std::polar(scenario.users.powers[k], group.user_phase[k]);
            for (std::size_t i = 0; i < n_grid; ++i)
                work[i] += rot * std::polar(1.0, base.omega(i) * dtau) * base.values[i];
        }

        if (terms == PsdTerms::linear_only)
        {
            for (std::size_t i = 0; i < n_grid; ++i)
                work[i] *= c.c1;
        }
        else
        {
            // To the lag domain, apply the cubic map, and back.
            centered_inverse(plan, work);
            const double fwd = double(n_grid) * base.freq_step / (2.0 * M_PI);
            for (cdouble &v : work)
            {
                const cdouble r = v * fwd;
                cdouble y = c.c3 * r * std::norm(r);
                if (terms == PsdTerms::all)
                    y += c.c1 * r;
                v = y;
            }
            centered_forward(plan, work);
            const double lag_step = 2.0 * M_PI / (double(n_grid) * base.freq_step);
            for (cdouble &v : work)
                v *= lag_step;
        }

        const double obs_dtau = obs[m].tau - obs[m2].tau;
        const cdouble w_factor = group.observer_factor * pair_scale;
        for (std::size_t i = 0; i < n_grid; ++i)
        {
            const cdouble term =
                w_factor * std::polar(1.0, -base.omega(i) * obs_dtau) * work[i];
            accum[i] += 2.0 * term.real();
        }
    };

    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t m2 = 0; m2 <= m; ++m2)
        {
            const int N_m = scenario.arrays[m].num_antennas;
            const int N_m2 = scenario.arrays[m2].num_antennas;
            const cdouble beta_pair =
                std::polar(obs[m].beta_mag, -obs[m].psi) *
                std::polar(obs[m2].beta_mag, obs[m2].psi);

            std::map<std::vector<std::int64_t>, PairGroup> groups;
            for (int n = 0; n < N_m; ++n)
                for (int n2 = 0; n2 < N_m2; ++n2)
                {
                    // On an array's own block, keep only one triangle; the
                    // other is the conjugate mirror handled by add_group.
                    if (m == m2 && n2 > n)
                        continue;
                    std::vector<std::int64_t> key(K);
                    std::vector<double> phase(K);
                    for (std::size_t k = 0; k < K; ++k)
                    {
                        const LinkParams &a = links.at(m, k);
                        const LinkParams &b = links.at(m2, k);
                        const double theta =
                            a.phi * double(n) - b.phi * double(n2) + a.psi - b.psi;
                        phase[k] = theta;
                        key[k] = quantize(theta);
                    }
                    PairGroup &g = groups[key];
                    if (g.user_phase.empty())
                        g.user_phase = phase;
                    double obs_phase = -(obs[m].phi * double(n) - obs[m2].phi * double(n2));
                    cdouble member = std::polar(1.0, obs_phase);
                    // The diagonal n = n2 of an array's own block is its own
                    // mirror image; halve it so the doubling is exact.
                    if (m == m2 && n == n2)
                        member *= 0.5;
                    g.observer_factor += member;
                }

            for (const auto &entry : groups)
                add_group(entry.second, m, m2, beta_pair);
        }

    // The mirrored accumulation keeps the running sum exactly real.
    SpectrumGrid out;
    out.freq_step = base.freq_step;
    out.values.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
        out.values[i] = accum[i].real();
    return out;
}

inline SpectrumGrid received_psd_general(const Scenario &scenario, const Location &observer,
                                         const SpectrumGrid &base,
                                         PsdTerms terms = PsdTerms::all)
{
    return received_psd_general(scenario, observer_links(scenario, observer), base, terms);
}

// Signal and third-order distortion components at one observer.
struct ObserverPsd
{
    SpectrumGrid signal_psd;
    SpectrumGrid distortion3_psd;
    SpectrumGrid total_psd;
};

// Single-user closed form. Signal and distortion share one spatial gain
//   G(w) = |sum_m |beta_m| e^{j(psi_m^(1) - psi_m) - j w (tau_m - tau_m^(1))}
//          D_{N_m}(phi_m^(1) - phi_m)|^2,
// so S_sig = c1 p S(w) G(w) and S_dis = c3 p^3 S3(w) G(w), where S3 is the
// transform of R |R|^2. At the user itself G = (sum_m |beta_m| N_m)^2 at
// every frequency.
inline ObserverPsd received_psd_single_user(const Scenario &scenario,
                                            const std::vector<LinkParams> &obs,
                                            const SpectrumGrid &base)
{
    validate(scenario);
    if (scenario.users.count() != 1)
        throw config_error("single-user closed form requires exactly one user");
    const std::size_t M = scenario.num_arrays();
    if (obs.size() != M)
        throw config_error("observer links must cover every array");

    const LinkTable links = user_links(scenario);
    const CorrelationGrid base_corr = autocorrelation(base);
    const double p = scenario.users.powers[0];
    const double sigma2 = pa_input_power(scenario.users, base_corr);
    const PaOutputCoefficients c = output_coefficients(scenario.pa, sigma2);
    const SpectrumGrid s3 = self_spectrum(base_corr, 3);

    const std::size_t n_grid = base.num_points();
    ObserverPsd out;
    out.signal_psd.freq_step = base.freq_step;
    out.distortion3_psd.freq_step = base.freq_step;
    out.total_psd.freq_step = base.freq_step;
    out.signal_psd.values.resize(n_grid);
    out.distortion3_psd.values.resize(n_grid);
    out.total_psd.values.resize(n_grid);

    std::vector<cdouble> beam(M);
    for (std::size_t m = 0; m < M; ++m)
    {
        const LinkParams &u = links.at(m, 0);
        beam[m] = obs[m].beta_mag * std::polar(1.0, u.psi - obs[m].psi) *
                  dirichlet(scenario.arrays[m].num_antennas, u.phi - obs[m].phi);
    }

    for (std::size_t i = 0; i < n_grid; ++i)
    {
        const double w = base.omega(i);
        cdouble field = 0.0;
        for (std::size_t m = 0; m < M; ++m)
            field += beam[m] * std::polar(1.0, -w * (obs[m].tau - links.at(m, 0).tau));
        const double gain = std::norm(field);
        const double sig = c.c1 * p * base.values[i].real() * gain;
        const double dis = c.c3 * p * p * p * s3.values[i].real() * gain;
        out.signal_psd.values[i] = sig;
        out.distortion3_psd.values[i] = dis;
        out.total_psd.values[i] = sig + dis;
    }
    return out;
}

// Multi-user signal PSD: each array beamforms toward every user, and the
// per-user beams add coherently across arrays:
//   c1 S(w) sum_k p_k |sum_m |beta_m| D_{N_m}(phi_m^(k) - phi_m)
//                      e^{j(psi_m^(k) - psi_m) + j w (tau_m^(k) - tau_m)}|^2.
inline SpectrumGrid signal_psd_multi(const Scenario &scenario,
                                     const std::vector<LinkParams> &obs,
                                     const SpectrumGrid &base)
{
    validate(scenario);
    const std::size_t M = scenario.num_arrays();
    const std::size_t K = scenario.users.count();
    if (obs.size() != M)
        throw config_error("observer links must cover every array");

    const LinkTable links = user_links(scenario);
    const CorrelationGrid base_corr = autocorrelation(base);
    const double sigma2 = pa_input_power(scenario.users, base_corr);
    const PaOutputCoefficients c = output_coefficients(scenario.pa, sigma2);

    const std::size_t n_grid = base.num_points();
    std::vector<cdouble> beam(M * K);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t k = 0; k < K; ++k)
        {
            const LinkParams &u = links.at(m, k);
            beam[m * K + k] = obs[m].beta_mag * std::polar(1.0, u.psi - obs[m].psi) *
                              dirichlet(scenario.arrays[m].num_antennas, u.phi - obs[m].phi);
        }

    SpectrumGrid out;
    out.freq_step = base.freq_step;
    out.values.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i)
    {
        const double w = base.omega(i);
        double gain = 0.0;
        for (std::size_t k = 0; k < K; ++k)
        {
            cdouble field = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                field += beam[m * K + k] *
                         std::polar(1.0, w * (links.at(m, k).tau - obs[m].tau));
            gain += scenario.users.powers[k] * std::norm(field);
        }
        out.values[i] = c.c1 * base.values[i].real() * gain;
    }
    return out;
}

// One intermodulation beam direction for the cubic term: the phase slope
// phi^(k) + phi^(k') - phi^(k''), its merged contributing triples, the
// combined power weight, and the physical angle when one exists.
struct ImDirection
{
    double phi = 0.0;
    std::vector<std::array<std::size_t, 3>> triples;  // (k, k', k'') with k <= k'
    double weight = 0.0;
    std::optional<double> theta;  // radians, empty when outside visible space
};

// Enumerates phi^(k) + phi^(k') - phi^(k'') over k <= k' and all k''.
// Phases are reduced modulo 2 pi into (-pi, pi]; directions closer than
// 1e-9 rad (circularly) are merged, and the k <-> k' symmetry doubles the
// weight of mixed pairs. For users in generic position the count is
// K^3/2 - K^2/2 + K.
inline std::vector<ImDirection> enumerate_im_directions(const std::vector<double> &phis,
                                                        const std::vector<double> &powers,
                                                        double spacing, double lambda)
{
    if (phis.empty() || phis.size() != powers.size())
        throw config_error("intermodulation enumeration needs matching phases and powers");
    const std::size_t K = phis.size();

    const auto reduce = [](double phi) {
        double r = std::fmod(phi, 2.0 * M_PI);
        if (r > M_PI)
            r -= 2.0 * M_PI;
        else if (r <= -M_PI)
            r += 2.0 * M_PI;
        return r;
    };
    const auto circ_dist = [](double a, double b) {
        double d = std::abs(a - b);
        return std::min(d, 2.0 * M_PI - d);
    };

    std::vector<ImDirection> out;
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t k2 = k; k2 < K; ++k2)
            for (std::size_t k3 = 0; k3 < K; ++k3)
            {
                const double phi = reduce(phis[k] + phis[k2] - phis[k3]);
                const double mult = (k == k2) ? 1.0 : 2.0;
                const double weight = mult * powers[k] * powers[k2] * powers[k3];
                ImDirection *slot = nullptr;
                for (ImDirection &d : out)
                    if (circ_dist(d.phi, phi) < 1e-9)
                    {
                        slot = &d;
                        break;
                    }
                if (slot == nullptr)
                {
                    out.push_back(ImDirection{});
                    slot = &out.back();
                    slot->phi = phi;
                }
                slot->weight += weight;
                slot->triples.push_back({k, k2, k3});
            }

    for (ImDirection &d : out)
        d.theta = phi_to_theta(d.phi, spacing, lambda);
    std::sort(out.begin(), out.end(),
              [](const ImDirection &a, const ImDirection &b) { return a.phi < b.phi; });
    return out;
}

// Third-order distortion PSD at an observer. Every ordered user triple
// (k, k', k'') radiates a beam with phase slope phi^(k)+phi^(k')-phi^(k''),
// and array pairs combine with the triple-shifted spectrum
//   S3_t(w) = FT{ R(tau + d1) R(tau + d2) R*(tau + d3) },
//   d_i = tau_m^(k_i) - tau_m'^(k_i):
//   c3 sum_t p_t sum_{m,m'} |beta_m||beta_m'|
//       e^{j((psi_m^t - psi_m) - (psi_m'^t - psi_m'))} e^{-j w (tau_m - tau_m')}
//       S3_t(w) D_{N_m}(phi_m^t - phi_m) D*_{N_m'}(phi_m'^t - phi_m'),
// with psi_m^t = psi_m^(k) + psi_m^(k') - psi_m^(k''). The m <-> m'
// symmetry makes the sum real; it is accumulated as such.
inline SpectrumGrid distortion3_psd_multi(const Scenario &scenario,
                                          const std::vector<LinkParams> &obs,
                                          const SpectrumGrid &base)
{
    validate(scenario);
    const std::size_t M = scenario.num_arrays();
    const std::size_t K = scenario.users.count();
    if (obs.size() != M)
        throw config_error("observer links must cover every array");

    const LinkTable links = user_links(scenario);
    const CorrelationGrid base_corr = autocorrelation(base);
    const double sigma2 = pa_input_power(scenario.users, base_corr);
    const PaOutputCoefficients c = output_coefficients(scenario.pa, sigma2);

    const std::size_t n_grid = base.num_points();
    SpectrumGrid out;
    out.freq_step = base.freq_step;
    out.values.assign(n_grid, 0.0);

    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t k2 = k; k2 < K; ++k2)
            for (std::size_t k3 = 0; k3 < K; ++k3)
            {
                const double mult = (k == k2) ? 1.0 : 2.0;
                const double p_t = mult * scenario.users.powers[k] *
                                   scenario.users.powers[k2] * scenario.users.powers[k3];

                for (std::size_t m = 0; m < M; ++m)
                    for (std::size_t m2 = 0; m2 <= m; ++m2)
                    {
                        const double d1 = links.at(m, k).tau - links.at(m2, k).tau;
                        const double d2 = links.at(m, k2).tau - links.at(m2, k2).tau;
                        const double d3 = links.at(m, k3).tau - links.at(m2, k3).tau;
                        const SpectrumGrid s3 = shifted_triple_spectrum(base_corr, d1, d2, d3);

                        const double psi_t_m = links.at(m, k).psi + links.at(m, k2).psi -
                                               links.at(m, k3).psi - obs[m].psi;
                        const double psi_t_m2 = links.at(m2, k).psi + links.at(m2, k2).psi -
                                                links.at(m2, k3).psi - obs[m2].psi;
                        const double phi_t_m =
                            links.at(m, k).phi + links.at(m, k2).phi - links.at(m, k3).phi;
                        const double phi_t_m2 =
                            links.at(m2, k).phi + links.at(m2, k2).phi - links.at(m2, k3).phi;

                        const cdouble pair_factor =
                            obs[m].beta_mag * obs[m2].beta_mag *
                            std::polar(1.0, psi_t_m - psi_t_m2) *
                            dirichlet(scenario.arrays[m].num_antennas, phi_t_m - obs[m].phi) *
                            std::conj(dirichlet(scenario.arrays[m2].num_antennas,
                                                phi_t_m2 - obs[m2].phi));
                        const double obs_dtau = obs[m].tau - obs[m2].tau;
                        const double mirror = (m == m2) ? 1.0 : 2.0;

                        for (std::size_t i = 0; i < n_grid; ++i)
                        {
                            const cdouble term = pair_factor *
                                                 std::polar(1.0, -base.omega(i) * obs_dtau) *
                                                 s3.values[i];
                            out.values[i] += c.c3 * p_t * mirror * term.real();
                        }
                    }
            }
    return out;
}

// Array directivity of the linear signal for a single array: the pattern
// sum_k p_k |D_N(phi^(k) - phi(theta))|^2 sampled on the supplied angles
// and normalized so its average over them equals one (the isotropic
// reference for a uniform angle sweep).
inline std::vector<double> directivity_signal(const Scenario &scenario,
                                              const std::vector<double> &theta_rad)
{
    validate(scenario);
    if (scenario.num_arrays() != 1)
        throw config_error("directivity patterns require exactly one array");
    if (theta_rad.empty())
        throw config_error("directivity needs at least one angle");
    const ArrayDescriptor &arr = scenario.arrays[0];
    const double lambda = wavelength(scenario.carrier);
    const LinkTable links = user_links(scenario);

    std::vector<double> out(theta_rad.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < theta_rad.size(); ++i)
    {
        const double phi = 2.0 * M_PI / lambda * arr.spacing * std::cos(theta_rad[i]);
        double acc = 0.0;
        for (std::size_t k = 0; k < scenario.users.count(); ++k)
            acc += scenario.users.powers[k] *
                   std::norm(dirichlet(arr.num_antennas, links.at(0, k).phi - phi));
        out[i] = acc;
        mean += acc;
    }
    mean /= double(out.size());
    for (double &v : out)
        v /= mean;
    return out;
}

// Directivity of the third-order distortion for a single array: beams at
// every intermodulation direction, weighted by the combined user powers,
// normalized as directivity_signal. The spectral factor common to all
// angles cancels, so the pattern is frequency independent.
inline std::vector<double> directivity_distortion3(const Scenario &scenario,
                                                   const std::vector<double> &theta_rad)
{
    validate(scenario);
    if (scenario.num_arrays() != 1)
        throw config_error("directivity patterns require exactly one array");
    if (theta_rad.empty())
        throw config_error("directivity needs at least one angle");
    const ArrayDescriptor &arr = scenario.arrays[0];
    const double lambda = wavelength(scenario.carrier);
    const LinkTable links = user_links(scenario);

    std::vector<double> phis(scenario.users.count());
    for (std::size_t k = 0; k < phis.size(); ++k)
        phis[k] = links.at(0, k).phi;
    const std::vector<ImDirection> dirs =
        enumerate_im_directions(phis, scenario.users.powers, arr.spacing, lambda);

    std::vector<double> out(theta_rad.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < theta_rad.size(); ++i)
    {
        const double phi = 2.0 * M_PI / lambda * arr.spacing * std::cos(theta_rad[i]);
        double acc = 0.0;
        for (const ImDirection &d : dirs)
            acc += d.weight * std::norm(dirichlet(arr.num_antennas, d.phi - phi));
        out[i] = acc;
        mean += acc;
    }
    mean /= double(out.size());
    for (double &v : out)
        v /= mean;
    return out;
}

} // namespace beamspot

#endif
