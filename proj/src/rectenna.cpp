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

#include "wpt/rectenna.hpp"

#include "wpt/signal.hpp"

namespace wpt
{

DiodeCoefficients diode_coefficients(const RectennaParams& p)
{
    const double v = p.ideality * p.thermal_voltage;
    return DiodeCoefficients{p.saturation_current / (2.0 * v * v),
                             p.saturation_current / (24.0 * v * v * v * v)};
}

CVector effective_weights(const Eigen::Ref<const CMatrix>& channel,
                          const Eigen::Ref<const CMatrix>& transmit_weights)
{
    if (channel.rows() != transmit_weights.rows() || channel.cols() != transmit_weights.cols())
        throw std::invalid_argument("effective_weights: channel/weight shape mismatch");
    return channel.cwiseProduct(transmit_weights).rowwise().sum();
}

CVector tone_self_convolution(const Eigen::Ref<const CVector>& s)
{
    const Index n = s.size();
    CVector c = CVector::Zero(2 * n - 1);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            c(a + b) += s(a) * s(b);
    return c;
}

double zdc(const Eigen::Ref<const CVector>& s, const DiodeCoefficients& k,
           double antenna_impedance)
{
    if (!s.allFinite())
        throw std::invalid_argument("zdc: non-finite effective weights");
    const double r = antenna_impedance;
    const double quadratic = 0.5 * s.squaredNorm();
    const double quartic = tone_self_convolution(s).squaredNorm();
    return k.k2 * r * quadratic + k.k4 * r * r * 0.375 * quartic;
}

double zdc_time_oracle(const Eigen::Ref<const CVector>& s, const DiodeCoefficients& k,
                       double antenna_impedance, const ToneGrid& tones, const TimeGrid& grid)
{
    if (grid.num_samples < 4 * tones.num_subcarriers)
        throw std::invalid_argument("zdc_time_oracle: need K >= 4N for exact envelope moments");
    const CVector env = envelope_samples(s, tones, grid);
    const double r = antenna_impedance;
    return k.k2 * r * 0.5 * mean_envelope_sq(env)
         + k.k4 * r * r * 0.375 * mean_envelope_quartic(env);
}

TaylorCoefficients zdc_gradient(const Eigen::Ref<const CMatrix>& channel,
                                const Eigen::Ref<const CMatrix>& transmit_weights,
                                const DiodeCoefficients& k, double antenna_impedance)
{
    const Index n = channel.rows();
    const Index m = channel.cols();
    const CVector s = effective_weights(channel, transmit_weights);
    const CVector c = tone_self_convolution(s);
    const double r = antenna_impedance;

    // t_n = sum_{n1} s_{n1} conj(c_{n+n1}) collapses the constrained triple
    // sum over n + n1 = n2 + n3; the Wirtinger derivative with respect to
    // s*_n is then g_n = (k2 R / 2) s_n + (3 k4 R^2 / 4) conj(t_n).
    CVector g(n);
    for (Index t_idx = 0; t_idx < n; ++t_idx)
    {
        Complex acc(0.0, 0.0);
        for (Index n1 = 0; n1 < n; ++n1)
            acc += s(n1) * std::conj(c(t_idx + n1));
        g(t_idx) = 0.5 * k.k2 * r * s(t_idx) + 0.75 * k.k4 * r * r * std::conj(acc);
    }

    TaylorCoefficients out;
    out.re.resize(n, m);
    out.im.resize(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
        {
            const Complex z = g(i) * std::conj(channel(i, j));
            out.re(i, j) = 2.0 * z.real();
            out.im(i, j) = 2.0 * z.imag();
        }
    return out;
}

} // namespace wpt
