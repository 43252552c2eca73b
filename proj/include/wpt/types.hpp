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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace wpt
{

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd; // per-tone complex column (one antenna)
using CMatrix = Eigen::MatrixXcd; // (N, M): row = sub-carrier, column = antenna
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Frequency layout of the multisine: N evenly spaced sub-carriers per
// antenna, tone n at baseband offset n * delta_f (carrier f0 is bookkeeping
// only; every power and DC quantity depends on the baseband envelope alone).
struct ToneGrid
{
    Index num_subcarriers = 1;  // N >= 1
    Index num_antennas = 1;     // M >= 1
    double base_frequency = 1.0; // f0 [Hz], lowest sub-carrier
    double spacing = 1.0;        // delta_f [Hz], > 0

    ToneGrid() = default;
    ToneGrid(Index n, Index m, double f0, double delta_f)
        : num_subcarriers(n), num_antennas(m), base_frequency(f0), spacing(delta_f)
    {
        if (n < 1 || m < 1)
            throw std::invalid_argument("ToneGrid: need N >= 1 and M >= 1");
        if (!(f0 > 0.0) || !(delta_f > 0.0))
            throw std::invalid_argument("ToneGrid: need f0 > 0 and delta_f > 0");
    }

    // Envelope period T = 1 / delta_f [s]
    double period() const { return 1.0 / spacing; }
};

// Uniform sampling of one envelope period. K >= 4N makes every moment of
// |envelope|^2 and |envelope|^4 exact under the periodic trapezoidal rule.
struct TimeGrid
{
    Index num_samples = 1; // K
    double period = 1.0;   // T [s]

    TimeGrid() = default;
    TimeGrid(Index k, double t) : num_samples(k), period(t)
    {
        if (k < 1)
            throw std::invalid_argument("TimeGrid: need K >= 1");
        if (!(t > 0.0))
            throw std::invalid_argument("TimeGrid: need period > 0");
    }

    double sample_time(Index k) const { return period * double(k) / double(num_samples); }

    RVector sample_times() const
    {
        RVector t(num_samples);
        for (Index k = 0; k < num_samples; ++k)
            t(k) = sample_time(k);
        return t;
    }
};

// Default grid: `oversampling` samples per tone (16 by default elsewhere),
// never fewer than 4N.
inline TimeGrid make_time_grid(const ToneGrid& tones, Index oversampling = 16)
{
    if (oversampling < 4)
        throw std::invalid_argument("make_time_grid: oversampling < 4 breaks the quartic moments");
    return TimeGrid(oversampling * tones.num_subcarriers, tones.period());
}

inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }
inline double watts_to_dbw(double w) { return 10.0 * std::log10(w); }
inline double dbv_to_volts(double dbv) { return std::pow(10.0, dbv / 20.0); }
inline double volts_to_dbv(double v) { return 20.0 * std::log10(v); }

// Real/imaginary stacking used by the solver: x = [vec(Re W); vec(Im W)],
// column-major, length 2NM.
inline RVector stack_weights(const CMatrix& w)
{
    const Index nm = w.size();
    RVector x(2 * nm);
    x.head(nm) = Eigen::Map<const CVector>(w.data(), nm).real();
    x.tail(nm) = Eigen::Map<const CVector>(w.data(), nm).imag();
    return x;
}

inline CMatrix unstack_weights(const RVector& x, Index n, Index m)
{
    if (x.size() != 2 * n * m)
        throw std::invalid_argument("unstack_weights: size mismatch");
    CMatrix w(n, m);
    Eigen::Map<CVector> flat(w.data(), n * m);
    flat.real() = x.head(n * m);
    flat.imag() = x.tail(n * m);
    return w;
}

} // namespace wpt
