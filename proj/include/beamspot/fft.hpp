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

#ifndef beamspot_fft_H
#define beamspot_fft_H

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace beamspot
{

typedef std::complex<double> cdouble;

// Radix-2 iterative FFT with precomputed twiddles. Sizes are powers of two
// and at least 4 (the centered-grid transforms below require n % 4 == 0).
class FftPlan
{
  public:
    explicit FftPlan(std::size_t n) : n(n)
    {
        if (n < 4 || (n & (n - 1)) != 0)
            throw config_error("FFT size must be a power of two >= 4, got " + std::to_string(n));

        rev.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t(1) << log2n) < n)
            ++log2n;
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                r |= ((i >> b) & 1u) << (log2n - 1 - b);
            rev[i] = r;
        }

        tw.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k)
        {
            double a = -2.0 * M_PI * double(k) / double(n);
            tw[k] = cdouble(std::cos(a), std::sin(a));
        }
    }

    std::size_t size() const { return n; }

    // X[k] = sum_j x[j] e^{-2 pi i j k / n}
    void forward(std::vector<cdouble> &x) const { transform(x, false); }

    // x[j] = (1/n) sum_k X[k] e^{+2 pi i j k / n}
    void inverse(std::vector<cdouble> &x) const
    {
        transform(x, true);
        const double s = 1.0 / double(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] *= s;
    }

  private:
    std::size_t n;
    std::vector<std::size_t> rev;
    std::vector<cdouble> tw;

    void transform(std::vector<cdouble> &x, bool inv) const
    {
        if (x.size() != n)
            throw config_error("FFT input length " + std::to_string(x.size()) +
                               " does not match plan size " + std::to_string(n));

        for (std::size_t i = 0; i < n; ++i)
            if (rev[i] > i)
                std::swap(x[i], x[rev[i]]);

        for (std::size_t len = 2; len <= n; len <<= 1)
        {
            const std::size_t half = len >> 1;
            const std::size_t step = n / len;
            for (std::size_t base = 0; base < n; base += len)
            {
                for (std::size_t j = 0; j < half; ++j)
                {
                    cdouble w = tw[j * step];
                    if (inv)
                        w = std::conj(w);
                    const cdouble u = x[base + j];
                    const cdouble v = x[base + j + half] * w;
                    x[base + j] = u + v;
                    x[base + j + half] = u - v;
                }
            }
        }
    }
};

// Centered DFT pair used by the sampling grids: index i maps to the
// coordinate (i - n/2) * step on both sides of the transform.
//
//   forward:  X[i] = sum_j x[j] e^{-2 pi i (i - n/2)(j - n/2) / n}
//   inverse:  x[j] = (1/n) sum_i X[i] e^{+2 pi i (i - n/2)(j - n/2) / n}
//
// For n divisible by 4 this reduces to sign pre/post modulation of the
// ordinary FFT.
inline void centered_forward(const FftPlan &plan, std::vector<cdouble> &x)
{
    const std::size_t n = plan.size();
    for (std::size_t j = 1; j < n; j += 2)
        x[j] = -x[j];
    plan.forward(x);
    for (std::size_t i = 1; i < n; i += 2)
        x[i] = -x[i];
}

inline void centered_inverse(const FftPlan &plan, std::vector<cdouble> &x)
{
    const std::size_t n = plan.size();
    for (std::size_t i = 1; i < n; i += 2)
        x[i] = -x[i];
    plan.inverse(x);
    for (std::size_t j = 1; j < n; j += 2)
        x[j] = -x[j];
}

} // namespace beamspot

#endif
