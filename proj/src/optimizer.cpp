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

#include "wpt/optimizer.hpp"

#include "wpt/signal.hpp"

#include <Eigen/Cholesky>

namespace wpt
{

namespace
{

constexpr double hessian_floor = 1e-12;

// Iterates must keep at least this much normalized slack. At large t the
// log penalty is weak enough for Newton to legally accept points within
// rounding of the boundary, where barrier derivatives overflow and the
// physical round trip can flip a ~1e-16 slack. Stage minimizers sit at
// slack ~ m/t >= barrier_tol, far above the floor.
constexpr double slack_floor = 1e-13;

// Required amplifier input power of the transmit weights with its exact
// gradient and exact Hessian in stacked coordinates. `f` is the synthesis
// matrix of the time grid; `basis_re`/`basis_im` are the real/imaginary
// parts of the per-coordinate envelope derivatives (precomputable, they
// depend on `f` alone). Empty when any envelope sample leaves the
// invertible amplitude range.
struct RequiredPower
{
    double power = 0.0;
    RVector gradient;
    RMatrix hessian;
};

struct EnvelopeBasis
{
    RMatrix re; // K x 2N, rows Re[d_p] = [Re F, -Im F]
    RMatrix im; // K x 2N, rows Im[d_p] = [Im F,  Re F]
};

EnvelopeBasis envelope_basis(const CMatrix& f)
{
    const Index k = f.rows();
    const Index n = f.cols();
    EnvelopeBasis b;
    b.re.resize(k, 2 * n);
    b.re.leftCols(n) = f.real();
    b.re.rightCols(n) = -f.imag();
    b.im.resize(k, 2 * n);
    b.im.leftCols(n) = f.imag();
    b.im.rightCols(n) = f.real();
    return b;
}

// Pointwise integrand pieces over a whole envelope; corr = (phi'' - psi)/a^2
// stays finite as a -> 0. The beta = 1 case avoids pow/log in the hot path.
bool integrand_arrays(const Eigen::ArrayXd& a2, const SspaParams& p, bool derivatives,
                      double& phi_sum, Eigen::ArrayXd& psi, Eigen::ArrayXd& corr)
{
    const double inv_g2 = 1.0 / (p.gain * p.gain);
    if (p.smoothness == 1.0)
    {
        const double as2 = p.saturation * p.saturation;
        const Eigen::ArrayXd r = a2 / as2;
        const double lim = 1.0 - 2.0 * sspa_domain_margin;
        if ((r >= lim).any())
            return false;
        const Eigen::ArrayXd omr = 1.0 - r;
        phi_sum = 0.5 * inv_g2 * (a2 / omr).sum();
        if (derivatives)
        {
            psi = inv_g2 / omr.square();
            corr = (4.0 * inv_g2 / as2) / omr.cube();
        }
        return true;
    }
    phi_sum = 0.0;
    if (derivatives)
    {
        psi.resize(a2.size());
        corr.resize(a2.size());
    }
    for (Index k = 0; k < a2.size(); ++k)
    {
        const double a = std::sqrt(a2(k));
        const auto d = input_integrand(a, p);
        if (!d)
            return false;
        phi_sum += d->phi;
        if (derivatives)
        {
            psi(k) = d->psi;
            corr(k) = a > 0.0 ? (d->curv - d->psi) / a2(k) : 0.0;
        }
    }
    return true;
}

std::optional<RequiredPower> eval_required_power(const CMatrix& w, const SspaParams& p,
                                                 const CMatrix& f, const EnvelopeBasis* basis,
                                                 bool derivatives)
{
    const Index n = w.rows();
    const Index m = w.cols();
    const Index nm = n * m;
    const Index samples = f.rows();
    const double inv_k = 1.0 / double(samples);

    RequiredPower out;
    if (derivatives)
    {
        out.gradient = RVector::Zero(2 * nm);
        out.hessian = RMatrix::Zero(2 * nm, 2 * nm);
    }

    EnvelopeBasis local;
    if (derivatives && basis == nullptr)
    {
        local = envelope_basis(f);
        basis = &local;
    }

    Eigen::ArrayXd psi, corr;
    RMatrix rows;
    for (Index j = 0; j < m; ++j)
    {
        const CVector env = f * w.col(j);
        double phi_sum = 0.0;
        if (!integrand_arrays(env.array().abs2(), p, derivatives, phi_sum, psi, corr))
            return std::nullopt;
        out.power += phi_sum * inv_k;
        if (!derivatives)
            continue;

        // d power / d Re(w_n) + i d power / d Im(w_n) = (1/K) F^H (psi .* env)
        const CVector v = f.adjoint() * (psi * env.array()).matrix() * inv_k;
        out.gradient.segment(j * n, n) = v.real();
        out.gradient.segment(nm + j * n, n) = v.imag();

        // Exact per-antenna Hessian block: with q_p(k) = Re{conj(d_p) env},
        //   H = (1/K) [ Q^T diag(corr) Q + Bre^T diag(psi) Bre + Bim^T diag(psi) Bim ].
        const Eigen::ArrayXXcd proj = f.conjugate().array().colwise() * env.array();
        rows.resize(samples, 2 * n);
        rows.leftCols(n) = proj.real().matrix();
        rows.rightCols(n) = proj.imag().matrix();
        RMatrix block = rows.transpose() * corr.matrix().asDiagonal() * rows;
        block.noalias() += basis->re.transpose() * psi.matrix().asDiagonal() * basis->re;
        block.noalias() += basis->im.transpose() * psi.matrix().asDiagonal() * basis->im;
        block *= inv_k;

        out.hessian.block(j * n, j * n, n, n) = block.topLeftCorner(n, n);
        out.hessian.block(j * n, nm + j * n, n, n) = block.topRightCorner(n, n);
        out.hessian.block(nm + j * n, j * n, n, n) = block.bottomLeftCorner(n, n);
        out.hessian.block(nm + j * n, nm + j * n, n, n) = block.bottomRightCorner(n, n);
    }
    return out;
}

// Shared assembly of the barrier value/gradient/Hessian from a constraint
// list; empty when any constraint is violated.
std::optional<BarrierEval> assemble_barrier(const RVector& alpha, double t,
                                            const std::vector<ConstraintEval>& constraints,
                                            const RVector& x, bool derivatives)
{
    BarrierEval out;
    out.value = -alpha.dot(x);
    if (derivatives)
    {
        out.gradient = -alpha;
        out.hessian = RMatrix::Zero(x.size(), x.size());
    }
    for (const auto& c : constraints)
    {
        if (!(c.value < 0.0))
            return std::nullopt;
        out.value -= std::log(-c.value) / t;
        if (derivatives)
        {
            out.gradient += c.gradient / (-c.value * t);
            out.hessian.noalias() +=
                c.gradient * c.gradient.transpose() / (c.value * c.value * t);
            out.hessian += c.hessian / (-c.value * t);
        }
    }
    return out;
}

// Barrier subproblem in budget-normalized coordinates: x = stacked weights /
// sqrt(2 p_tr_max), so the transmit-power constraint is |x|^2 - 1 and both
// constraint values are dimensionless. The objective direction is scaled to
// unit norm, which makes barrier_tol a relative duality-gap bound.
struct NormalizedBarrier
{
    double sigma = 1.0;
    RVector alpha;
    double p_in_max = 1.0;
    std::optional<SspaParams> sspa;
    CMatrix synthesis;
    EnvelopeBasis basis;
    Index n = 0, m = 0;

    std::optional<std::vector<ConstraintEval>> constraints(const RVector& x,
                                                           bool derivatives) const
    {
        std::vector<ConstraintEval> cs;
        ConstraintEval c1;
        c1.value = x.squaredNorm() - 1.0;
        if (!(c1.value < -slack_floor))
            return std::nullopt;
        if (derivatives)
        {
            c1.gradient = 2.0 * x;
            c1.hessian = 2.0 * RMatrix::Identity(x.size(), x.size());
        }
        cs.push_back(std::move(c1));

        if (sspa)
        {
            const CMatrix w = unstack_weights(sigma * x, n, m);
            const auto rp = eval_required_power(w, *sspa, synthesis, &basis, derivatives);
            if (!rp)
                return std::nullopt;
            ConstraintEval c2;
            c2.value = rp->power / p_in_max - 1.0;
            if (!(c2.value < -slack_floor))
                return std::nullopt;
            if (derivatives)
            {
                c2.gradient = (sigma / p_in_max) * rp->gradient;
                c2.hessian = (sigma * sigma / p_in_max) * rp->hessian;
            }
            cs.push_back(std::move(c2));
        }
        return cs;
    }

    NewtonObjective objective(double t) const
    {
        NewtonObjective obj;
        obj.value = [this, t](const RVector& x) -> std::optional<double> {
            const auto cs = constraints(x, false);
            if (!cs)
                return std::nullopt;
            const auto b = assemble_barrier(alpha, t, *cs, x, false);
            if (!b)
                return std::nullopt;
            return b->value;
        };
        obj.eval = [this, t](const RVector& x, double& value, RVector& grad,
                             RMatrix& hess) -> bool {
            const auto cs = constraints(x, true);
            if (!cs)
                return false;
            const auto b = assemble_barrier(alpha, t, *cs, x, true);
            if (!b)
                return false;
            value = b->value;
            grad = b->gradient;
            hess = b->hessian;
            return true;
        };
        return obj;
    }
};

NormalizedBarrier make_normalized_barrier(const PowerBudgets& budgets,
                                          const std::optional<SspaParams>& sspa,
                                          const ToneGrid& tones, const SolverConfig& cfg)
{
    NormalizedBarrier nb;
    nb.sigma = std::sqrt(2.0 * budgets.p_tr_max);
    nb.p_in_max = budgets.p_in_max;
    nb.sspa = sspa;
    nb.synthesis = synthesis_matrix(tones.num_subcarriers,
                                    make_time_grid(tones, cfg.oversampling).num_samples);
    nb.basis = envelope_basis(nb.synthesis);
    nb.n = tones.num_subcarriers;
    nb.m = tones.num_antennas;
    return nb;
}

// Central path t_start, mu t_start, ... until m/t <= barrier_tol.
RVector barrier_path(const NormalizedBarrier& nb, RVector x, double t_start,
                     const SolverConfig& cfg, double* t_final = nullptr)
{
    const double num_constraints = nb.sspa ? 2.0 : 1.0;
    double t = t_start;
    for (;;)
    {
        x = newton_minimize(x, nb.objective(t), cfg);
        if (num_constraints / t <= cfg.barrier_tol)
            break;
        t *= cfg.barrier_mu;
    }
    if (t_final)
        *t_final = t;
    return x;
}

CMatrix input_weights_of(const CMatrix& transmit, const SspaParams& p, const ToneGrid& tones,
                         const TimeGrid& grid)
{
    const CMatrix f = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    CMatrix input(transmit.rows(), transmit.cols());
    for (Index j = 0; j < transmit.cols(); ++j)
    {
        const CVector env = f * transmit.col(j);
        CVector pre(env.size());
        for (Index k = 0; k < env.size(); ++k)
        {
            const double a = std::abs(env(k));
            pre(k) = a == 0.0 ? Complex(0.0, 0.0) : env(k) * (amam_inverse(a, p) / a);
        }
        input.col(j) = project_to_subcarriers(pre, transmit.rows());
    }
    return input;
}

OptResult run_scp(const CMatrix& channel, const PowerBudgets& budgets,
                  const std::optional<SspaParams>& sspa, const RectennaParams& rect,
                  const ToneGrid& tones, const SolverConfig& cfg)
{
    cfg.validate();
    if (channel.rows() != tones.num_subcarriers || channel.cols() != tones.num_antennas)
        throw std::invalid_argument("scp: channel shape does not match the tone grid");
    if (channel.isZero(0.0))
        throw std::invalid_argument("scp: degenerate channel, all gains are zero");

    const auto diode = diode_coefficients(rect);
    const double r_ant = rect.antenna_impedance;
    const TimeGrid grid = make_time_grid(tones, cfg.oversampling);

    CMatrix w = feasible_start(channel, budgets, sspa, tones, cfg);
    OptResult res;
    res.per_iteration_zdc.push_back(zdc(effective_weights(channel, w), diode, r_ant));

    NormalizedBarrier nb = make_normalized_barrier(budgets, sspa, tones, cfg);

    for (Index l = 1; l <= cfg.scp_max_iters; ++l)
    {
        const TaylorCoefficients taylor = zdc_gradient(channel, w, diode, r_ant);
        const RVector alpha_raw = nb.sigma * taylor.stacked();
        const double alpha_norm = alpha_raw.norm();
        nb.alpha = alpha_norm > 0.0 ? RVector(alpha_raw / alpha_norm)
                                    : RVector(RVector::Zero(alpha_raw.size()));

        CMatrix w_next;
        try
        {
            RVector x = stack_weights(w) / nb.sigma;
            // The physical round trip can push a hair past the slack floor;
            // shrinking relaxes both constraints.
            for (int pull = 0; pull < 200 && !nb.constraints(x, false); ++pull)
                x *= 1.0 - 1e-9;
            x = barrier_path(nb, x, cfg.barrier_t0, cfg);
            w_next = unstack_weights(nb.sigma * x, channel.rows(), channel.cols());
        }
        catch (const NoProgressError& e)
        {
            throw NoProgressError("scp round " + std::to_string(l) + ": " + e.what());
        }

        // A round may not reduce the linearized objective; if the barrier
        // solution fell short of the warm start (possible only within the
        // duality gap), keep the operating point and stop.
        const RVector dx = stack_weights(w_next) - stack_weights(w);
        if (taylor.stacked().dot(dx) < 0.0)
            w_next = w;

        res.per_iteration_zdc.push_back(zdc(effective_weights(channel, w_next), diode, r_ant));
        const double displacement = (stack_weights(w_next) - stack_weights(w)).norm();
        const double scale = std::max(stack_weights(w_next).norm(), 1e-300);
        w = w_next;
        res.scp_iterations = l;
        if (displacement / scale < cfg.scp_tol)
            break;
    }

    res.weights = w;
    res.zdc_value = res.per_iteration_zdc.back();
    res.constraint_slacks.first = average_power(w) - budgets.p_tr_max;
    if (sspa)
    {
        const auto need = try_required_input_power(w, *sspa, tones, grid);
        if (!need)
            throw std::logic_error("scp: final iterate left the amplifier domain");
        res.constraint_slacks.second = *need - budgets.p_in_max;
        res.input_weights = input_weights_of(w, *sspa, tones, grid);
    }
    else
    {
        res.constraint_slacks.second = -std::numeric_limits<double>::infinity();
        res.input_weights = w;
    }
    return res;
}

} // namespace

ConstraintEval constraint_f1(const Eigen::Ref<const CMatrix>& w, const PowerBudgets& budgets)
{
    ConstraintEval c;
    const RVector x = stack_weights(w);
    c.value = 0.5 * x.squaredNorm() - budgets.p_tr_max;
    c.gradient = x;
    c.hessian = RMatrix::Identity(x.size(), x.size());
    return c;
}

std::optional<ConstraintEval> try_constraint_f2(const Eigen::Ref<const CMatrix>& w,
                                                const SspaParams& sspa,
                                                const PowerBudgets& budgets,
                                                const ToneGrid& tones, const TimeGrid& grid)
{
    if (w.rows() != tones.num_subcarriers)
        throw std::invalid_argument("constraint_f2: weight rows != N");
    const CMatrix f = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    const auto rp = eval_required_power(w, sspa, f, nullptr, true);
    if (!rp)
        return std::nullopt;
    ConstraintEval c;
    c.value = rp->power - budgets.p_in_max;
    c.gradient = rp->gradient;
    c.hessian = rp->hessian;
    return c;
}

ConstraintEval constraint_f2(const Eigen::Ref<const CMatrix>& w, const SspaParams& sspa,
                             const PowerBudgets& budgets, const ToneGrid& tones,
                             const TimeGrid& grid)
{
    auto c = try_constraint_f2(w, sspa, budgets, tones, grid);
    if (!c)
        throw std::domain_error("constraint_f2: envelope amplitude reaches A_s");
    return std::move(*c);
}

std::optional<BarrierEval> barrier_objective(const Eigen::Ref<const CMatrix>& w,
                                             const TaylorCoefficients& taylor, double t,
                                             const PowerBudgets& budgets,
                                             const std::optional<SspaParams>& sspa,
                                             const ToneGrid& tones, const TimeGrid& grid)
{
    if (!(t > 0.0))
        throw std::invalid_argument("barrier_objective: t must be positive");
    std::vector<ConstraintEval> cs;
    cs.push_back(constraint_f1(w, budgets));
    if (sspa)
    {
        auto c2 = try_constraint_f2(w, *sspa, budgets, tones, grid);
        if (!c2)
            return std::nullopt;
        cs.push_back(std::move(*c2));
    }
    return assemble_barrier(taylor.stacked(), t, cs, stack_weights(w), true);
}

RVector newton_minimize(const RVector& start, const NewtonObjective& objective,
                        const SolverConfig& cfg)
{
    cfg.validate();
    RVector x = start;
    double value = 0.0;
    RVector grad;
    RMatrix hess;
    if (!objective.eval(x, value, grad, hess))
        throw std::invalid_argument("newton_minimize: start point outside the objective domain");

    for (Index iter = 0; iter < cfg.newton_max_iters; ++iter)
    {
        if (grad.norm() <= cfg.newton_tol)
            break;

        RMatrix h = hess;
        h.diagonal().array() += hessian_floor;
        RVector direction = -Eigen::LDLT<RMatrix>(h).solve(grad);
        double slope = grad.dot(direction);
        if (!direction.allFinite() || !(slope < 0.0))
        {
            direction = -grad;
            slope = grad.dot(direction);
        }

        double step = 1.0;
        bool accepted = false;
        RVector x_try;
        while (step >= 1e-20)
        {
            x_try = x + step * direction;
            const auto trial = objective.value(x_try);
            if (trial && *trial <= value + cfg.armijo_c * step * slope)
            {
                accepted = true;
                break;
            }
            step *= cfg.line_search_backtrack;
        }
        if (!accepted)
        {
            // At the numerical floor of the objective the remaining descent
            // is below machine resolution; treat as converged.
            if (std::abs(slope) <= 1e-14 * (1.0 + std::abs(value)))
                break;
            throw NoProgressError("newton_minimize: line search underflow");
        }

        x = x_try;
        if (!objective.eval(x, value, grad, hess))
            throw std::logic_error("newton_minimize: accepted point left the domain");
    }
    return x;
}

CMatrix barrier_solve(const TaylorCoefficients& taylor, const Eigen::Ref<const CMatrix>& start,
                      const PowerBudgets& budgets, const std::optional<SspaParams>& sspa,
                      const ToneGrid& tones, const SolverConfig& cfg)
{
    cfg.validate();
    const Index n = start.rows();
    const Index m = start.cols();
    if (n != tones.num_subcarriers || m != tones.num_antennas)
        throw std::invalid_argument("barrier_solve: start shape does not match the tone grid");
    if (taylor.re.rows() != n || taylor.re.cols() != m || taylor.im.rows() != n
        || taylor.im.cols() != m)
        throw std::invalid_argument("barrier_solve: taylor shape mismatch");

    NormalizedBarrier nb = make_normalized_barrier(budgets, sspa, tones, cfg);
    const RVector alpha = nb.sigma * taylor.stacked();
    const double alpha_norm = alpha.norm();
    nb.alpha = alpha_norm > 0.0 ? RVector(alpha / alpha_norm) : RVector(RVector::Zero(2 * n * m));

    const RVector x = barrier_path(nb, stack_weights(start) / nb.sigma, cfg.barrier_t0, cfg);
    return unstack_weights(nb.sigma * x, n, m);
}

CMatrix feasible_start(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const std::optional<SspaParams>& sspa, const ToneGrid& tones,
                       const SolverConfig& cfg)
{
    cfg.validate();
    if (channel.rows() != tones.num_subcarriers || channel.cols() != tones.num_antennas)
        throw std::invalid_argument("feasible_start: channel shape mismatch");
    if (channel.isZero(0.0))
        return CMatrix::Zero(channel.rows(), channel.cols());

    const TimeGrid grid = make_time_grid(tones, cfg.oversampling);
    const CMatrix f = synthesis_matrix(tones.num_subcarriers, grid.num_samples);
    const CMatrix matched = channel.conjugate();
    const double margin = cfg.feasibility_margin;

    double scale = std::sqrt((1.0 - margin) * budgets.p_tr_max / average_power(matched));
    for (int halvings = 0; halvings < 600; ++halvings)
    {
        const CMatrix w = scale * matched;
        bool ok = true;
        if (sspa)
        {
            for (Index j = 0; ok && j < w.cols(); ++j)
                if ((f * w.col(j)).array().abs().maxCoeff()
                    > (1.0 - 1e-3) * sspa->saturation)
                    ok = false;
            if (ok)
            {
                const auto need = eval_required_power(w, *sspa, f, nullptr, false);
                ok = need && need->power <= (1.0 - margin) * budgets.p_in_max;
            }
        }
        if (ok)
            return w;
        scale *= 0.5;
    }
    throw std::runtime_error("feasible_start: could not scale into the feasible region");
}

OptResult scp_optimize(const Eigen::Ref<const CMatrix>& channel, const PowerBudgets& budgets,
                       const SspaParams& sspa, const RectennaParams& rect,
                       const ToneGrid& tones, const SolverConfig& cfg)
{
    return run_scp(channel, budgets, sspa, rect, tones, cfg);
}

OptResult scp_rectenna_only(const Eigen::Ref<const CMatrix>& channel, double p_tr_max,
                            const RectennaParams& rect, const ToneGrid& tones,
                            const SolverConfig& cfg)
{
    // The input budget is inert without an amplifier constraint.
    const PowerBudgets budgets(1.0, p_tr_max);
    return run_scp(channel, budgets, std::nullopt, rect, tones, cfg);
}

} // namespace wpt
