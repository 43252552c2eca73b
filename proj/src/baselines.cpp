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

#include "wpt/baselines.hpp"

#include "wpt/signal.hpp"

namespace wpt
{

namespace
{

// Transmit weights obtained by clipping the given amplifier input through
// the AM/AM curve and keeping the in-band content.
CMatrix clip_and_project(const CMatrix& input, const SspaParams& sspa, const CMatrix& synthesis)
{
    CMatrix out(input.rows(), input.cols());
    for (Index j = 0; j < input.cols(); ++j)
    {
        const CVector env = synthesis * input.col(j);
        out.col(j) = project_to_subcarriers(apply_to_envelope(env, sspa), input.rows());
    }
    return out;
}

} // namespace

CMatrix optimize_rectenna_only(const Eigen::Ref<const CMatrix>& channel, double p_tr_max,
                               const RectennaParams& rect, const ToneGrid& tones,
                               const SolverConfig& cfg)
{
    return scp_rectenna_only(channel, p_tr_max, rect, tones, cfg).weights;
}

double eval_ideal_hpa(const Eigen::Ref<const CMatrix>& channel,
                      const Eigen::Ref<const CMatrix>& transmit_weights,
                      const RectennaParams& rect)
{
    return zdc(effective_weights(channel, transmit_weights), diode_coefficients(rect),
               rect.antenna_impedance);
}

DecouplingResult eval_decoupling_detail(const Eigen::Ref<const CMatrix>& channel,
                                        const PowerBudgets& budgets, const SspaParams& sspa,
                                        const RectennaParams& rect, const ToneGrid& tones,
                                        const TimeGrid& grid, const SolverConfig& cfg,
                                        bool scale_input_to_budget)
{
    const auto harvester_opt = scp_rectenna_only(channel, budgets.p_tr_max, rect, tones, cfg);
    CMatrix input = harvester_opt.weights;
    if (scale_input_to_budget)
        input *= std::sqrt(budgets.p_in_max / average_power(input));
    else if (average_power(input) > budgets.p_in_max)
        input *= std::sqrt(budgets.p_in_max / average_power(input));

    const CMatrix synthesis = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    CMatrix transmitted = clip_and_project(input, sspa, synthesis);

    // The clipped in-band power may still exceed the transmit budget; shrink
    // the input until it complies (output power grows with the input scale).
    if (average_power(transmitted) > budgets.p_tr_max)
    {
        double lo = 0.0, hi = 1.0;
        CMatrix best = CMatrix::Zero(input.rows(), input.cols());
        for (int iter = 0; iter < 100; ++iter)
        {
            const double mid = 0.5 * (lo + hi);
            const CMatrix candidate = clip_and_project((mid * input).eval(), sspa, synthesis);
            if (average_power(candidate) <= budgets.p_tr_max)
            {
                lo = mid;
                best = candidate;
            }
            else
                hi = mid;
        }
        transmitted = best;
    }

    DecouplingResult res;
    res.transmit_weights = transmitted;
    res.scp_iterations = harvester_opt.scp_iterations;
    res.zdc_value = zdc(effective_weights(channel, transmitted), diode_coefficients(rect),
                        rect.antenna_impedance);
    return res;
}

double eval_decoupling(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const SspaParams& sspa, const RectennaParams& rect,
                       const ToneGrid& tones, const TimeGrid& grid, const SolverConfig& cfg)
{
    return eval_decoupling_detail(channel, budgets, sspa, rect, tones, grid, cfg).zdc_value;
}

CMatrix scaled_matched_filter(const Eigen::Ref<const CMatrix>& channel, double power)
{
    if (channel.isZero(0.0))
        throw std::invalid_argument("scaled_matched_filter: all-zero channel");
    if (!(power >= 0.0))
        throw std::invalid_argument("scaled_matched_filter: negative power");
    const CMatrix matched = channel.conjugate();
    return matched * std::sqrt(power / average_power(matched));
}

} // namespace wpt
