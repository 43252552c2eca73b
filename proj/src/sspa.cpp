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

#include "wpt/sspa.hpp"

#include "wpt/signal.hpp"

namespace wpt
{

namespace
{

// 1 - u^e without cancellation for u near 1 (u in (0, 1]).
double one_minus_pow(double u, double e)
{
    return -std::expm1(e * std::log(u));
}

} // namespace

double amam_forward(double amplitude_in, const SspaParams& p)
{
    if (!(amplitude_in >= 0.0))
        throw std::invalid_argument("amam_forward: amplitude must be >= 0");
    if (amplitude_in == 0.0)
        return 0.0;
    const double two_beta = 2.0 * p.smoothness;
    const double y = p.gain * amplitude_in / p.saturation;
    if (y <= 1.0)
        return p.gain * amplitude_in * std::exp(-std::log1p(std::pow(y, two_beta)) / two_beta);
    // Factor y out of the root so y^(2 beta) never overflows; cap one ulp
    // below A_s so the output stays below saturation even where the curve
    // flattens past double resolution.
    const double out = p.saturation * std::exp(-std::log1p(std::pow(y, -two_beta)) / two_beta);
    return std::min(out, std::nextafter(p.saturation, 0.0));
}

double amam_inverse(double amplitude_out, const SspaParams& p)
{
    if (!(amplitude_out >= 0.0) || amplitude_out >= p.saturation)
        throw std::domain_error("amam_inverse: amplitude must lie in [0, A_s)");
    if (amplitude_out == 0.0)
        return 0.0;
    const double two_beta = 2.0 * p.smoothness;
    const double one_minus_r = one_minus_pow(amplitude_out / p.saturation, two_beta);
    return amplitude_out / p.gain * std::exp(-std::log(one_minus_r) / two_beta);
}

CVector apply_to_envelope(const Eigen::Ref<const CVector>& samples, const SspaParams& p)
{
    if (!samples.allFinite())
        throw std::invalid_argument("apply_to_envelope: non-finite samples");
    CVector out(samples.size());
    for (Index k = 0; k < samples.size(); ++k)
    {
        const double a = std::abs(samples(k));
        out(k) = (a == 0.0) ? Complex(0.0, 0.0) : samples(k) * (amam_forward(a, p) / a);
    }
    return out;
}

CVector project_to_subcarriers(const Eigen::Ref<const CVector>& samples, Index num_tones)
{
    const Index k = samples.size();
    if (k < 2 * num_tones)
        throw std::invalid_argument("project_to_subcarriers: need K >= 2N to keep distortion "
                                    "products from aliasing onto the in-band coefficients");
    return synthesis_matrix(num_tones, k).adjoint() * samples / double(k);
}

std::optional<SspaIntegrand> input_integrand(double a, const SspaParams& p, double rel_margin)
{
    if (!(a >= 0.0) || a >= p.saturation * (1.0 - rel_margin))
        return std::nullopt;
    const double inv_g2 = 1.0 / (p.gain * p.gain);
    if (a == 0.0)
        return SspaIntegrand{0.0, inv_g2, inv_g2};
    const double two_beta = 2.0 * p.smoothness;
    const double r = std::pow(a / p.saturation, two_beta);
    const double one_minus_r = one_minus_pow(a / p.saturation, two_beta);
    const double inv_beta = 1.0 / p.smoothness;
    // phi  = a^2 / (2 G^2) (1-r)^(-1/beta)
    // psi  = phi'/a = G^-2 (1-r)^(-1-1/beta)
    // phi''=         G^-2 (1 + (2 beta + 1) r) (1-r)^(-2-1/beta)
    const double phi = 0.5 * a * a * inv_g2 * std::pow(one_minus_r, -inv_beta);
    const double psi = inv_g2 * std::pow(one_minus_r, -1.0 - inv_beta);
    const double curv = inv_g2 * (1.0 + (two_beta + 1.0) * r) * std::pow(one_minus_r, -2.0 - inv_beta);
    return SspaIntegrand{phi, psi, curv};
}

double required_input_power(const Eigen::Ref<const CMatrix>& transmit_weights,
                            const SspaParams& p, const ToneGrid& tones, const TimeGrid& grid)
{
    const CMatrix f = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    double total = 0.0;
    for (Index m = 0; m < transmit_weights.cols(); ++m)
    {
        const Eigen::ArrayXd amps = (f * transmit_weights.col(m)).array().abs();
        double acc = 0.0;
        for (Index k = 0; k < amps.size(); ++k)
        {
            if (amps(k) >= p.saturation)
                throw std::domain_error("required_input_power: envelope reaches A_s; the "
                                        "transmit waveform is outside the amplifier's range");
            const double inv = amam_inverse(amps(k), p);
            acc += 0.5 * inv * inv;
        }
        total += acc / double(amps.size());
    }
    return total;
}

std::optional<double> try_required_input_power(const Eigen::Ref<const CMatrix>& transmit_weights,
                                               const SspaParams& p, const ToneGrid& tones,
                                               const TimeGrid& grid, double rel_margin)
{
    const CMatrix f = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    double total = 0.0;
    for (Index m = 0; m < transmit_weights.cols(); ++m)
    {
        const Eigen::ArrayXd amps = (f * transmit_weights.col(m)).array().abs();
        double acc = 0.0;
        for (Index k = 0; k < amps.size(); ++k)
        {
            const auto d = input_integrand(amps(k), p, rel_margin);
            if (!d)
                return std::nullopt;
            acc += d->phi;
        }
        total += acc / double(amps.size());
    }
    return total;
}

} // namespace wpt
