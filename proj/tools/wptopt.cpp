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

#include "wpt/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

std::string summary_path_for(const std::string& path)
{
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + "_summary";
    return path.substr(0, dot) + "_summary" + path.substr(dot);
}

std::string format_from_path(const std::string& path)
{
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".json")
        return "json";
    return "csv";
}

int cmd_run(const std::string& config_path, const std::string& seed_text,
            const std::string& out_override, std::string format,
            const std::string& strategies_csv, wpt::Index jobs)
{
    wpt::ExperimentConfig cfg = wpt::load_config_file(config_path);
    if (!seed_text.empty())
        cfg.seed = std::stoull(seed_text);
    if (!out_override.empty())
        cfg.output_path = out_override;
    if (!strategies_csv.empty())
    {
        cfg.strategies.clear();
        std::stringstream ss(strategies_csv);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                cfg.strategies.push_back(item);
    }
    cfg.validate();
    if (format.empty())
        format = format_from_path(cfg.output_path);

    const auto records = wpt::run_sweep(cfg, jobs);
    wpt::emit_results(records, cfg, cfg.output_path, format);

    const auto aggregates = wpt::aggregate_records(records);
    if (format == "csv")
    {
        std::ofstream summary(summary_path_for(cfg.output_path));
        wpt::emit_summary_csv(aggregates, summary);
    }

    wpt::Index failed = 0;
    for (const auto& r : records)
        if (!r.ok())
        {
            ++failed;
            std::cerr << "cell failed: " << r.strategy << " N=" << r.n << " p_tr=" << r.p_tr_dbw
                      << " dBW channel=" << r.channel << ": " << r.error << '\n';
        }

    std::cout << records.size() << " records -> " << cfg.output_path;
    if (format == "csv")
        std::cout << " (+ " << summary_path_for(cfg.output_path) << ")";
    std::cout << '\n';
    wpt::emit_summary_csv(aggregates, std::cout);
    if (failed > 0)
        std::cerr << failed << " cell(s) failed\n";
    return failed == 0 ? 0 : 1;
}

int cmd_single(wpt::Index n, wpt::Index m, double ptr_dbw, double pin_dbw, double as_dbv,
               double beta, double gain, std::uint64_t seed, wpt::Index channel,
               const std::string& strategy)
{
    wpt::ExperimentConfig cfg;
    cfg.n_list = {n};
    cfg.m = m;
    cfg.p_tr_dbw = {ptr_dbw};
    cfg.p_in_dbw = pin_dbw;
    cfg.sspa_a_s_dbv = as_dbv;
    cfg.sspa_beta = beta;
    cfg.sspa_gain = gain;
    cfg.seed = seed;
    cfg.num_channels = channel + 1;
    cfg.strategies = {strategy};
    cfg.validate();

    const wpt::SweepRecord rec = wpt::run_cell(cfg, strategy, n, ptr_dbw, channel);
    wpt::emit_csv({rec}, std::cout);
    if (!rec.ok())
    {
        std::cerr << "cell failed: " << rec.error << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"multisine waveform optimization for wireless power transfer"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a sweep described by a JSON config");
    std::string config_path, seed_text, out_override, format, strategies_csv;
    wpt::Index jobs = 1;
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed_text, "override the config seed");
    run->add_option("--out", out_override, "override the output path");
    run->add_option("--format", format, "csv or json (default: from output extension)")
        ->check(CLI::IsMember({"csv", "json", ""}));
    run->add_option("--strategies", strategies_csv,
                    "comma-separated subset of opt,decoupling,ideal,smf");
    run->add_option("--jobs", jobs, "worker threads for sweep cells")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "run the oracle/gradient self-test battery");

    auto* single = app.add_subcommand("single", "run one sweep cell and print its record");
    wpt::Index n = 8, m = 1, channel = 0;
    double ptr_dbw = -40.0, pin_dbw = -20.0, as_dbv = -35.0, beta = 1.0, gain = 1.0;
    std::uint64_t seed = 1;
    std::string strategy = "opt";
    single->add_option("--n", n, "sub-carriers")->check(CLI::PositiveNumber);
    single->add_option("--m", m, "antennas")->check(CLI::PositiveNumber);
    single->add_option("--ptr-dbw", ptr_dbw, "transmit power budget [dBW]");
    single->add_option("--pin-dbw", pin_dbw, "input power budget [dBW]");
    single->add_option("--as-dbv", as_dbv, "amplifier saturation [dBV]");
    single->add_option("--beta", beta, "amplifier smoothness");
    single->add_option("--gain", gain, "amplifier small-signal gain");
    single->add_option("--seed", seed, "channel stream seed");
    single->add_option("--channel", channel, "channel index within the stream");
    single->add_option("--strategy", strategy, "opt, decoupling, ideal or smf")
        ->check(CLI::IsMember({"opt", "decoupling", "ideal", "smf"}));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
            return cmd_run(config_path, seed_text, out_override, format, strategies_csv, jobs);
        if (check->parsed())
        {
            const int failures = wpt::run_self_checks(std::cout);
            std::cout << (failures == 0 ? "all checks passed" : "checks FAILED") << '\n';
            return failures == 0 ? 0 : 1;
        }
        if (single->parsed())
            return cmd_single(n, m, ptr_dbw, pin_dbw, as_dbv, beta, gain, seed, channel,
                              strategy);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
