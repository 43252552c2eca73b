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

#include "wpt/baselines.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wpt
{

// Everything a sweep needs; defaults are the desk-scale Wi-Fi-like setting
// (f0 = 5.18 GHz, G = 1, beta = 1, A_s = -35 dBV, P_in = -20 dBW, N = 8,
// M = 1, 50 Rayleigh channels).
struct ExperimentConfig
{
    std::vector<Index> n_list{8};
    Index m = 1;
    double f0_hz = 5.18e9;
    double delta_f_hz = 312.5e3;

    double sspa_gain = 1.0;
    double sspa_a_s_dbv = -35.0;
    double sspa_beta = 1.0;

    RectennaParams rectenna{5e-6, 1.05, 25.86e-3, 50.0};

    double p_in_dbw = -20.0;
    std::vector<double> p_tr_dbw{-40.0};

    std::vector<std::string> strategies{"opt", "decoupling", "ideal", "smf"};
    Index num_channels = 50;
    std::uint64_t seed = 1;
    SolverConfig solver;
    std::string output_path = "results.csv";

    SspaParams sspa() const { return SspaParams(sspa_gain, dbv_to_volts(sspa_a_s_dbv), sspa_beta); }
    void validate() const;
};

// Strict JSON loading: unknown keys are rejected at every nesting level.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

struct SweepRecord
{
    std::string strategy;
    Index n = 0;
    Index m = 0;
    double p_tr_dbw = 0.0;
    Index channel = 0;
    double zdc = 0.0;
    double papr = 0.0;
    Index iters = 0;
    double ms = 0.0;
    std::string error; // empty = success

    bool ok() const { return error.empty(); }
};

// i.i.d. CN(0,1) entries from a counter-based stream keyed by (seed, index):
// any record's channel is reproducible in isolation.
CMatrix generate_channel(Index n, Index m, std::uint64_t seed, std::uint64_t index);

// One cell of the sweep, computed directly.
SweepRecord run_cell(const ExperimentConfig& cfg, const std::string& strategy, Index n,
                     double p_tr_dbw, Index channel);

// Full sweep over (N, p_tr, channel, strategy). Cells are independent;
// `jobs` > 1 runs them on a small thread pool, output order is always the
// deterministic cell order. Per-cell failures are recorded, never thrown.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, Index jobs = 1);

// Mean zdc/papr per (strategy, N, p_tr) across channels; failed cells are
// skipped and counted separately.
struct AggregateRecord
{
    std::string strategy;
    Index n = 0;
    Index m = 0;
    double p_tr_dbw = 0.0;
    Index channels = 0; // successful cells
    Index failures = 0;
    double zdc_mean = 0.0;
    double papr_mean = 0.0;
};
std::vector<AggregateRecord> aggregate_records(const std::vector<SweepRecord>& records);

// CSV with columns exactly: strategy,N,M,p_tr_dbw,channel,zdc,papr,iters,ms.
// Failed cells leave zdc/papr empty. JSON mirrors the records plus the full
// resolved config and the aggregates.
void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out);
void emit_summary_csv(const std::vector<AggregateRecord>& aggregates, std::ostream& out);
std::string records_to_json(const std::vector<SweepRecord>& records,
                            const ExperimentConfig& cfg);
std::vector<SweepRecord> parse_records_json(const std::string& json_text);

// emit_results: write records to `path` as csv or json (see above).
void emit_results(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg,
                  const std::string& path, const std::string& format);

// Fast oracle/gradient self-test battery behind `wptopt check`; prints one
// line per check, returns the number of failures.
int run_self_checks(std::ostream& out);

} // namespace wpt
