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

// Synthesis matrix F of the periodic multisine on the uniform grid:
// F(k, n) = exp(i 2 pi n k / K), so envelope = F * weights_column.
CMatrix synthesis_matrix(Index num_tones, Index num_samples);

// Complex baseband envelope of one antenna's multisine on the time grid:
// sample k equals sum_n w_n * exp(i 2 pi n delta_f t_k).
CVector envelope_samples(const Eigen::Ref<const CVector>& weights_column,
                         const ToneGrid& tones, const TimeGrid& grid);

// Average RF power of the weight matrix under the 1-ohm convention:
// (1/2) sum_{n,m} |w_{n,m}|^2 [W].
double average_power(const Eigen::Ref<const CMatrix>& weights);

// Peak-to-average power ratio of the envelope, max_k |env|^2 / mean_k |env|^2.
// Throws std::invalid_argument on an all-zero column.
double papr(const Eigen::Ref<const CVector>& weights_column,
            const ToneGrid& tones, const TimeGrid& grid);

// Period averages of |envelope|^2 and |envelope|^4 (trapezoidal = uniform
// mean on the periodic grid; exact for K >= 2N-1 resp. K >= 4N-3).
double mean_envelope_sq(const Eigen::Ref<const CVector>& envelope);
double mean_envelope_quartic(const Eigen::Ref<const CVector>& envelope);

} // namespace wpt
