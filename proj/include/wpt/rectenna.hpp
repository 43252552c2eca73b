// SPDX-License-Identifier: Apache-2.0
//
// wptopt - multisine waveform optimization for wireless power transfer
// with nonlinear amplifier and rectenna models
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

#pragma once

#include "wpt/types.hpp"

namespace wpt
{

// Diode and antenna constants of the energy harvester.
struct RectennaParams
{
    double saturation_current = 5e-6;  // i_s [A], >= 0
    double ideality = 1.05;            // eta0
    double thermal_voltage = 25.86e-3; // V0 [V]
    double antenna_impedance = 50.0;   // R_ant [ohm]

    RectennaParams() = default;
    RectennaParams(double i_s, double eta0, double v0, double r_ant)
        : saturation_current(i_s), ideality(eta0), thermal_voltage(v0), antenna_impedance(r_ant)
    {
        if (!(i_s >= 0.0) || !(eta0 > 0.0) || !(v0 > 0.0) || !(r_ant > 0.0))
            throw std::invalid_argument("RectennaParams: parameters must be positive");
    }
};

// Truncated Taylor coefficients of the diode current, k_i = i_s / (i! (eta0 V0)^i).
struct DiodeCoefficients
{
    double k2 = 0.0;
    double k4 = 0.0;
};

DiodeCoefficients diode_coefficients(const RectennaParams& p);

// Per-tone received amplitudes s_n = sum_m h_{n,m} w_{n,m}.
CVector effective_weights(const Eigen::Ref<const CMatrix>& channel,
                          const Eigen::Ref<const CMatrix>& transmit_weights);

// Self-convolution c_d = sum_{a+b=d} s_a s_b, d = 0 .. 2N-2. The quartic
// tone sum over n0+n1 = n2+n3 collapses to sum_d |c_d|^2, which also equals
// the period mean of |envelope|^4.
CVector tone_self_convolution(const Eigen::Ref<const CVector>& s);

// Harvested-DC scaling term in frequency domain:
// k2 R (1/2) sum_n |s_n|^2 + k4 R^2 (3/8) sum_{n0+n1=n2+n3} s_n0 s_n1 s*_n2 s*_n3.
double zdc(const Eigen::Ref<const CVector>& s, const DiodeCoefficients& k,
           double antenna_impedance);

// Time-domain route to the same value via period averages of the received
// envelope: k2 R (1/2) mean|env|^2 + k4 R^2 (3/8) mean|env|^4. Requires
// K >= 4N so both moments are exact on the grid.
double zdc_time_oracle(const Eigen::Ref<const CVector>& s, const DiodeCoefficients& k,
                       double antenna_impedance, const ToneGrid& tones, const TimeGrid& grid);

// First-order Taylor coefficients of zdc at the operating point: partial
// derivatives with respect to the real and imaginary part of each weight.
struct TaylorCoefficients
{
    RMatrix re; // d zdc / d Re(w_{n,m})
    RMatrix im; // d zdc / d Im(w_{n,m})

    RVector stacked() const
    {
        RVector x(2 * re.size());
        x.head(re.size()) = Eigen::Map<const RVector>(re.data(), re.size());
        x.tail(im.size()) = Eigen::Map<const RVector>(im.data(), im.size());
        return x;
    }
};

TaylorCoefficients zdc_gradient(const Eigen::Ref<const CMatrix>& channel,
                                const Eigen::Ref<const CMatrix>& transmit_weights,
                                const DiodeCoefficients& k, double antenna_impedance);

} // namespace wpt
