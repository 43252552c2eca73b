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

#include <optional>

namespace wpt
{

// Rapp AM/AM amplifier: out = G a / (1 + (G a / A_s)^(2 beta))^(1 / (2 beta)).
// Strictly increasing, output always below A_s; beta -> inf approaches an
// ideal linear-then-clip curve. No AM/PM.
struct SspaParams
{
    double gain = 1.0;       // G, small-signal gain, > 0
    double saturation = 1.0; // A_s [V], > 0
    double smoothness = 1.0; // beta, > 0

    SspaParams() = default;
    SspaParams(double g, double a_s, double beta)
        : gain(g), saturation(a_s), smoothness(beta)
    {
        if (!(g > 0.0) || !(a_s > 0.0) || !(beta > 0.0))
            throw std::invalid_argument("SspaParams: gain, saturation and smoothness must be > 0");
    }
};

// Relative distance from A_s at and beyond which envelope amplitudes are
// treated as outside the amplifier's invertible range by the solver path.
inline constexpr double sspa_domain_margin = 1e-9;

// Forward AM/AM curve. Throws std::invalid_argument for a < 0.
double amam_forward(double amplitude_in, const SspaParams& p);

// Unique input amplitude with amam_forward(input) == amplitude_out.
// Domain is [0, A_s); throws std::domain_error outside it.
double amam_inverse(double amplitude_out, const SspaParams& p);

// Apply the AM/AM curve sample-wise to a complex envelope; phase preserved.
CVector apply_to_envelope(const Eigen::Ref<const CVector>& samples, const SspaParams& p);

// In-band content of a periodic envelope: DFT coefficients at baseband
// harmonics 0 .. N-1, coefficient n = (1/K) sum_k samples_k e^{-i 2 pi n k / K}.
// Models the band-pass filter after the amplifier. Requires K >= 2N.
CVector project_to_subcarriers(const Eigen::Ref<const CVector>& samples, Index num_tones);

// Pointwise pieces of the input-power integrand phi(a) = amam_inverse(a)^2 / 2
// evaluated together: psi = phi'(a)/a (smooth at a = 0 with value 1/G^2) and
// curv = phi''(a). Empty when `a` is not safely inside [0, A_s (1 - margin)).
struct SspaIntegrand
{
    double phi;
    double psi;
    double curv;
};
std::optional<SspaIntegrand> input_integrand(double amplitude_out, const SspaParams& p,
                                             double rel_margin = sspa_domain_margin);

// Average input power the amplifier needs to emit the transmit weights:
// sum over antennas of mean_k amam_inverse(|env(t_k)|)^2 / 2. Throws
// std::domain_error when any envelope sample reaches A_s.
double required_input_power(const Eigen::Ref<const CMatrix>& transmit_weights,
                            const SspaParams& p, const ToneGrid& tones, const TimeGrid& grid);

// Non-throwing variant with the solver's domain margin; empty = infeasible.
std::optional<double> try_required_input_power(const Eigen::Ref<const CMatrix>& transmit_weights,
                                               const SspaParams& p, const ToneGrid& tones,
                                               const TimeGrid& grid,
                                               double rel_margin = sspa_domain_margin);

} // namespace wpt
