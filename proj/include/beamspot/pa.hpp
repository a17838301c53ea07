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

#ifndef beamspot_pa_H
#define beamspot_pa_H

#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"
#include "signals.hpp"

namespace beamspot
{

// Memoryless third-order amplifier y = b1 x + b3 x |x|^2, identical at
// every antenna branch.
struct PaModel
{
    cdouble b1 = 1.0;
    cdouble b3 = 0.0;

    cdouble apply(cdouble x) const { return b1 * x + b3 * x * std::norm(x); }

    void apply(std::vector<cdouble> &samples) const
    {
        for (cdouble &x : samples)
            x = apply(x);
    }
};

// Second-order statistics of the amplifier output for jointly Gaussian
// inputs. With input cross-correlation R and per-branch input power
// sigma2 = R(0), the output cross-correlation is exactly
//   R_yy = c1 R + c3 R |R|^2,
// where the linear part absorbs the mean AM/AM compression:
//   c1 = |b1 + 2 sigma2 b3|^2,   c3 = 2 |b3|^2.
struct PaOutputCoefficients
{
    double c1 = 1.0;
    double c3 = 0.0;
};

inline PaOutputCoefficients output_coefficients(const PaModel &pa, double input_power)
{
    if (!(input_power >= 0.0))
        throw config_error("amplifier input power must be >= 0");
    PaOutputCoefficients c;
    c.c1 = std::norm(pa.b1 + 2.0 * input_power * pa.b3);
    c.c3 = 2.0 * std::norm(pa.b3);
    return c;
}

// Pointwise map of an input cross-correlation grid to the output one.
inline CorrelationGrid output_correlation(const PaOutputCoefficients &c,
                                          const CorrelationGrid &input)
{
    CorrelationGrid out = input;
    for (cdouble &v : out.values)
        v = c.c1 * v + c.c3 * v * std::norm(v);
    return out;
}

// Checked variant for caller-supplied correlations: a cross-correlation of
// branches with per-branch power input_power cannot exceed input_power in
// magnitude, so anything larger signals an inconsistent model setup.
inline CorrelationGrid output_correlation(const PaOutputCoefficients &c,
                                          const CorrelationGrid &input, double input_power,
                                          double slack = 1e-9)
{
    const double bound = input_power * (1.0 + slack);
    for (const cdouble &v : input.values)
        if (std::abs(v) > bound)
            throw consistency_error("correlation magnitude " + std::to_string(std::abs(v)) +
                                    " exceeds branch input power " +
                                    std::to_string(input_power));
    return output_correlation(c, input);
}

} // namespace beamspot

#endif
