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

#include "wpt/optimizer.hpp"

namespace wpt
{

// Harvester-optimal waveform ignoring the amplifier: maximize zdc subject to
// the transmit-power budget alone. The solution exhausts the budget
// (transmit power equals p_tr_max within 1e-6 relative).
CMatrix optimize_rectenna_only(const Eigen::Ref<const CMatrix>& channel, double p_tr_max,
                               const RectennaParams& rect, const ToneGrid& tones,
                               const SolverConfig& cfg);

// zdc of the waveform through a transparent amplifier.
double eval_ideal_hpa(const Eigen::Ref<const CMatrix>& channel,
                      const Eigen::Ref<const CMatrix>& transmit_weights,
                      const RectennaParams& rect);

// The decoupled strategy: feed the harvester-optimal waveform straight into
// the amplifier, unscaled (it already meets the input budget whenever
// p_tr_max <= p_in_max; an explicit check enforces the budget otherwise).
// The amplifier clips it, the band-pass filter keeps the in-band content,
// and if the transmitted power still exceeds p_tr_max the input is shrunk
// until it complies. With scale_input_to_budget the input is instead
// rescaled to p_in_max first, which drives the amplifier deep into
// saturation at desk-scale budgets.
struct DecouplingResult
{
    double zdc_value = 0.0;
    CMatrix transmit_weights;
    Index scp_iterations = 0; // rounds spent on the rectenna-only solve
};

DecouplingResult eval_decoupling_detail(const Eigen::Ref<const CMatrix>& channel,
                                        const PowerBudgets& budgets, const SspaParams& sspa,
                                        const RectennaParams& rect, const ToneGrid& tones,
                                        const TimeGrid& grid, const SolverConfig& cfg,
                                        bool scale_input_to_budget = false);

double eval_decoupling(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const SspaParams& sspa, const RectennaParams& rect,
                       const ToneGrid& tones, const TimeGrid& grid, const SolverConfig& cfg);

// Low-complexity reference: w ~ conj(h) scaled to the requested average
// power. Throws std::invalid_argument on an all-zero channel.
CMatrix scaled_matched_filter(const Eigen::Ref<const CMatrix>& channel, double power);

} // namespace wpt
