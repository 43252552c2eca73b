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

#include "wpt/rectenna.hpp"
#include "wpt/sspa.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace wpt
{

struct PowerBudgets
{
    double p_in_max = 1.0; // [W], amplifier input power cap
    double p_tr_max = 1.0; // [W], transmit power cap

    PowerBudgets() = default;
    PowerBudgets(double p_in, double p_tr) : p_in_max(p_in), p_tr_max(p_tr)
    {
        if (!(p_in > 0.0) || !std::isfinite(p_in) || !(p_tr > 0.0) || !std::isfinite(p_tr))
            throw std::invalid_argument("PowerBudgets: budgets must be positive and finite");
    }
};

struct SolverConfig
{
    double scp_tol = 1e-6;             // relative weight displacement between rounds
    Index scp_max_iters = 300;
    double barrier_t0 = 1.0;           // initial barrier parameter
    double barrier_mu = 10.0;          // barrier multiplier, > 1
    double barrier_tol = 1e-8;         // duality-gap bound (budget-normalized units)
    double newton_tol = 1e-8;          // gradient-norm stop
    Index newton_max_iters = 100;
    double line_search_backtrack = 0.5;
    double armijo_c = 0.01;
    double feasibility_margin = 0.1;   // relative slack demanded of the start point
    Index oversampling = 16;           // time samples per period = oversampling * N

    void validate() const
    {
        const bool ok = scp_tol > 0.0 && scp_max_iters > 0 && barrier_t0 > 0.0
                     && barrier_mu > 1.0 && barrier_tol > 0.0 && newton_tol > 0.0
                     && newton_max_iters > 0 && line_search_backtrack > 0.0
                     && line_search_backtrack < 1.0 && armijo_c > 0.0
                     && feasibility_margin > 0.0 && feasibility_margin < 1.0
                     && oversampling >= 4;
        if (!ok)
            throw std::invalid_argument("SolverConfig: invalid parameter");
    }
};

// Line search could not move off the current iterate while the gradient is
// still significant; the caller may retry with larger barrier_t0.
struct NoProgressError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// One inequality constraint f(x) <= 0 evaluated at the stacked weights:
// value, exact gradient, exact Hessian (positive semidefinite, both
// constraints are convex).
struct ConstraintEval
{
    double value = 0.0;
    RVector gradient;
    RMatrix hessian;
};

// Transmit-power constraint (1/2) sum |w|^2 - p_tr_max.
ConstraintEval constraint_f1(const Eigen::Ref<const CMatrix>& w, const PowerBudgets& budgets);

// Amplifier input-power constraint required_input_power(w) - p_in_max.
// Throws std::domain_error when the envelope leaves the invertible range.
ConstraintEval constraint_f2(const Eigen::Ref<const CMatrix>& w, const SspaParams& sspa,
                             const PowerBudgets& budgets, const ToneGrid& tones,
                             const TimeGrid& grid);

// Non-throwing variant for line searches: empty = out of domain.
std::optional<ConstraintEval> try_constraint_f2(const Eigen::Ref<const CMatrix>& w,
                                                const SspaParams& sspa,
                                                const PowerBudgets& budgets,
                                                const ToneGrid& tones, const TimeGrid& grid);

// Log-barrier reformulation of the linearized subproblem at parameter t:
//   value = -sum(alpha_re w_re + alpha_im w_im) - (1/t) sum_i log(-f_i(w)).
// Empty when w is not strictly feasible. The Hessian combines, per
// constraint, the gradient outer product (1/t) grad grad^T / f^2 with the
// constraint Hessian scaled by (1/t)/(-f).
struct BarrierEval
{
    double value = 0.0;
    RVector gradient;
    RMatrix hessian;
};

std::optional<BarrierEval> barrier_objective(const Eigen::Ref<const CMatrix>& w,
                                             const TaylorCoefficients& taylor, double t,
                                             const PowerBudgets& budgets,
                                             const std::optional<SspaParams>& sspa,
                                             const ToneGrid& tones, const TimeGrid& grid);

// Generic objective interface for the damped Newton minimizer. `eval` fills
// value/gradient/Hessian-model and returns false outside the domain;
// `value` is the cheap probe the backtracking line search uses.
struct NewtonObjective
{
    std::function<bool(const RVector&, double&, RVector&, RMatrix&)> eval;
    std::function<std::optional<double>(const RVector&)> value;
};

// Damped Newton with Armijo backtracking. Stops at gradient norm <=
// newton_tol or after newton_max_iters accepted steps; every accepted
// iterate stays inside the objective domain. Throws NoProgressError when
// the line search underflows away from a stationary point.
RVector newton_minimize(const RVector& start, const NewtonObjective& objective,
                        const SolverConfig& cfg);

// Central path over t = t0, mu t0, ... with warm starts, run on the
// budget-normalized problem (weights scaled by sqrt(2 p_tr_max), constraints
// relative to their budgets, objective direction normalized); exits once
// m/t <= barrier_tol for m active constraints, so barrier_tol bounds the
// relative duality gap. Without `sspa` only the transmit-power constraint
// is enforced.
CMatrix barrier_solve(const TaylorCoefficients& taylor, const Eigen::Ref<const CMatrix>& start,
                      const PowerBudgets& budgets, const std::optional<SspaParams>& sspa,
                      const ToneGrid& tones, const SolverConfig& cfg);

// Matched-filter start w ~ conj(h), scaled down until both constraints hold
// with the configured relative margin and the envelope clears saturation.
CMatrix feasible_start(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const std::optional<SspaParams>& sspa, const ToneGrid& tones,
                       const SolverConfig& cfg);

struct OptResult
{
    CMatrix weights;            // transmit-referred solution
    CMatrix input_weights;      // in-band content of the inverse-mapped input envelope
    double zdc_value = 0.0;
    Index scp_iterations = 0;
    std::vector<double> per_iteration_zdc; // true zdc, start point first
    std::pair<double, double> constraint_slacks{0.0, 0.0}; // (f1, f2); f2 = -inf if absent
};

// Successive convex programming on the true zdc objective: linearize at the
// operating point, solve the barrier subproblem, stop when successive
// solutions are closer than scp_tol (relative). The recorded zdc trace is
// non-decreasing. Throws std::invalid_argument on an all-zero channel.
OptResult scp_optimize(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const SspaParams& sspa, const RectennaParams& rect,
                       const ToneGrid& tones, const SolverConfig& cfg);

// Same machinery with the transmit-power constraint only (amplifier ignored).
OptResult scp_rectenna_only(const Eigen::Ref<const CMatrix>& channel, double p_tr_max,
                            const RectennaParams& rect, const ToneGrid& tones,
                            const SolverConfig& cfg);

} // namespace wpt
