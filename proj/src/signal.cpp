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

#include "wpt/signal.hpp"

#include <numbers>

namespace wpt
{

CMatrix synthesis_matrix(Index num_tones, Index num_samples)
{
    if (num_tones < 1 || num_samples < 1)
        throw std::invalid_argument("synthesis_matrix: empty dimensions");
    CMatrix f(num_samples, num_tones);
    const double step = 2.0 * std::numbers::pi / double(num_samples);
    for (Index n = 0; n < num_tones; ++n)
        for (Index k = 0; k < num_samples; ++k)
            f(k, n) = std::polar(1.0, step * double(n) * double(k));
    return f;
}

CVector envelope_samples(const Eigen::Ref<const CVector>& weights_column,
                         const ToneGrid& tones, const TimeGrid& grid)
{
    if (weights_column.size() != tones.num_subcarriers)
        throw std::invalid_argument("envelope_samples: weight column size != N");
    if (!weights_column.allFinite())
        throw std::invalid_argument("envelope_samples: non-finite weights");
    // t_k = k T / K makes the tone phases 2 pi n k / K; delta_f cancels.
    return synthesis_matrix(tones.num_subcarriers, grid.num_samples) * weights_column;
}

double average_power(const Eigen::Ref<const CMatrix>& weights)
{
    if (!weights.allFinite())
        throw std::invalid_argument("average_power: non-finite weights");
    return 0.5 * weights.squaredNorm();
}

double papr(const Eigen::Ref<const CVector>& weights_column,
            const ToneGrid& tones, const TimeGrid& grid)
{
    if (weights_column.isZero(0.0))
        throw std::invalid_argument("papr: undefined for an all-zero column");
    const Eigen::ArrayXd p = envelope_samples(weights_column, tones, grid).array().abs2();
    return p.maxCoeff() / p.mean();
}

double mean_envelope_sq(const Eigen::Ref<const CVector>& envelope)
{
    return envelope.array().abs2().mean();
}

double mean_envelope_quartic(const Eigen::Ref<const CVector>& envelope)
{
    return envelope.array().abs2().square().mean();
}

} // namespace wpt
