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

#include "wpt/signal.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace wpt
{

using nlohmann::json;

namespace
{

constexpr double quiet_nan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Counter-based generator: one independent, reproducible stream per key.
struct SplitMix64
{
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next()
    {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1]
    double uniform() { return double((next() >> 11) + 1) * 0x1.0p-53; }
};

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index)
{
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
    return mix.next();
}

} // namespace

void ExperimentConfig::validate() const
{
    if (n_list.empty() || p_tr_dbw.empty() || strategies.empty())
        throw std::invalid_argument("ExperimentConfig: n, p_tr_dbw and strategies must be non-empty");
    if (num_channels < 1)
        throw std::invalid_argument("ExperimentConfig: num_channels must be >= 1");
    for (Index n : n_list)
        if (n < 1)
            throw std::invalid_argument("ExperimentConfig: tone counts must be >= 1");
    if (m < 1)
        throw std::invalid_argument("ExperimentConfig: antenna count must be >= 1");
    for (const auto& s : strategies)
        if (s != "opt" && s != "decoupling" && s != "ideal" && s != "smf")
            throw std::invalid_argument("ExperimentConfig: unknown strategy '" + s + "'");
    sspa();    // throws on bad amplifier parameters
    solver.validate();
}

CMatrix generate_channel(Index n, Index m, std::uint64_t seed, std::uint64_t index)
{
    SplitMix64 rng(stream_key(seed, index));
    CMatrix h(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
        {
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            // CN(0,1): real and imaginary parts each N(0, 1/2)
            h(i, j) = Complex(radius * std::cos(angle), radius * std::sin(angle))
                      / std::sqrt(2.0);
        }
    return h;
}

SweepRecord run_cell(const ExperimentConfig& cfg, const std::string& strategy, Index n,
                     double p_tr_dbw, Index channel)
{
    SweepRecord rec;
    rec.strategy = strategy;
    rec.n = n;
    rec.m = cfg.m;
    rec.p_tr_dbw = p_tr_dbw;
    rec.channel = channel;
    rec.zdc = quiet_nan;
    rec.papr = quiet_nan;

    const auto t_begin = std::chrono::steady_clock::now();
    try
    {
        const ToneGrid tones(n, cfg.m, cfg.f0_hz, cfg.delta_f_hz);
        const TimeGrid grid = make_time_grid(tones, cfg.solver.oversampling);
        const CMatrix h = generate_channel(n, cfg.m, cfg.seed, std::uint64_t(channel));
        const PowerBudgets budgets(dbw_to_watts(cfg.p_in_dbw), dbw_to_watts(p_tr_dbw));
        const SspaParams sspa = cfg.sspa();

        CMatrix transmit;
        if (strategy == "opt")
        {
            const OptResult res = scp_optimize(h, budgets, sspa, cfg.rectenna, tones, cfg.solver);
            transmit = res.weights;
            rec.zdc = res.zdc_value;
            rec.iters = res.scp_iterations;
        }
        else if (strategy == "ideal")
        {
            const OptResult res =
                scp_rectenna_only(h, budgets.p_tr_max, cfg.rectenna, tones, cfg.solver);
            transmit = res.weights;
            rec.zdc = eval_ideal_hpa(h, transmit, cfg.rectenna);
            rec.iters = res.scp_iterations;
        }
        else if (strategy == "decoupling")
        {
            const DecouplingResult res = eval_decoupling_detail(h, budgets, sspa, cfg.rectenna,
                                                                tones, grid, cfg.solver);
            transmit = res.transmit_weights;
            rec.zdc = res.zdc_value;
            rec.iters = res.scp_iterations;
        }
        else if (strategy == "smf")
        {
            transmit = scaled_matched_filter(h, budgets.p_tr_max);
            rec.zdc = eval_ideal_hpa(h, transmit, cfg.rectenna);
        }
        else
            throw std::invalid_argument("unknown strategy '" + strategy + "'");

        double peak_papr = 0.0;
        bool any = false;
        for (Index j = 0; j < transmit.cols(); ++j)
            if (!transmit.col(j).isZero(0.0))
            {
                peak_papr = std::max(peak_papr, papr(transmit.col(j), tones, grid));
                any = true;
            }
        rec.papr = any ? peak_papr : quiet_nan;
    }
    catch (const std::exception& e)
    {
        rec.error = e.what();
    }
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now()
                                                       - t_begin)
                 .count();
    return rec;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg, Index jobs)
{
    cfg.validate();

    struct Cell
    {
        Index n;
        double p_tr;
        Index channel;
        const std::string* strategy;
    };
    std::vector<Cell> cells;
    for (Index n : cfg.n_list)
        for (double p_tr : cfg.p_tr_dbw)
            for (Index channel = 0; channel < cfg.num_channels; ++channel)
                for (const auto& strategy : cfg.strategies)
                    cells.push_back({n, p_tr, channel, &strategy});

    std::vector<SweepRecord> records(cells.size());
    const auto work = [&](std::size_t i) {
        records[i] = run_cell(cfg, *cells[i].strategy, cells[i].n, cells[i].p_tr,
                              cells[i].channel);
    };

    const Index workers = std::max<Index>(1, std::min<Index>(jobs, Index(cells.size())));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            work(i);
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (Index t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (;;)
                {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= cells.size())
                        return;
                    work(i);
                }
            });
        for (auto& th : pool)
            th.join();
    }
    return records;
}

std::vector<AggregateRecord> aggregate_records(const std::vector<SweepRecord>& records)
{
    std::vector<AggregateRecord> out;
    const auto find = [&](const SweepRecord& r) -> AggregateRecord& {
        for (auto& a : out)
            if (a.strategy == r.strategy && a.n == r.n && a.m == r.m
                && a.p_tr_dbw == r.p_tr_dbw)
                return a;
        AggregateRecord fresh;
        fresh.strategy = r.strategy;
        fresh.n = r.n;
        fresh.m = r.m;
        fresh.p_tr_dbw = r.p_tr_dbw;
        out.push_back(fresh);
        return out.back();
    };
    for (const auto& r : records)
    {
        AggregateRecord& a = find(r);
        if (!r.ok())
        {
            ++a.failures;
            continue;
        }
        a.zdc_mean += r.zdc;
        a.papr_mean += std::isnan(r.papr) ? 0.0 : r.papr;
        ++a.channels;
    }
    for (auto& a : out)
        if (a.channels > 0)
        {
            a.zdc_mean /= double(a.channels);
            a.papr_mean /= double(a.channels);
        }
    return out;
}

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out)
{
    out << "strategy,N,M,p_tr_dbw,channel,zdc,papr,iters,ms\n";
    for (const auto& r : records)
    {
        out << r.strategy << ',' << r.n << ',' << r.m << ',' << fmt(r.p_tr_dbw) << ','
            << r.channel << ',';
        if (r.ok())
            out << fmt(r.zdc) << ',' << (std::isnan(r.papr) ? std::string() : fmt(r.papr));
        else
            out << ',';
        char ms_buf[32];
        std::snprintf(ms_buf, sizeof ms_buf, "%.3f", r.ms);
        out << ',' << r.iters << ',' << ms_buf << '\n';
    }
}

void emit_summary_csv(const std::vector<AggregateRecord>& aggregates, std::ostream& out)
{
    out << "strategy,N,M,p_tr_dbw,channels,failures,zdc_mean,papr_mean\n";
    for (const auto& a : aggregates)
        out << a.strategy << ',' << a.n << ',' << a.m << ',' << fmt(a.p_tr_dbw) << ','
            << a.channels << ',' << a.failures << ',' << fmt(a.zdc_mean) << ','
            << fmt(a.papr_mean) << '\n';
}

namespace
{

json record_to_json(const SweepRecord& r)
{
    json j;
    j["strategy"] = r.strategy;
    j["n"] = r.n;
    j["m"] = r.m;
    j["p_tr_dbw"] = r.p_tr_dbw;
    j["channel"] = r.channel;
    j["zdc"] = r.zdc;
    j["papr"] = r.papr;
    j["iters"] = r.iters;
    j["ms"] = r.ms;
    j["error"] = r.error;
    return j;
}

void expect_keys(const json& j, const char* where, std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : j.items())
    {
        bool known = false;
        for (const char* a : allowed)
            if (key == a)
            {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument(std::string("config: unknown key '") + key + "' in "
                                        + where);
    }
}

} // namespace

std::string records_to_json(const std::vector<SweepRecord>& records,
                            const ExperimentConfig& cfg)
{
    json j;
    j["config"] = json::parse(config_to_json(cfg));
    j["records"] = json::array();
    for (const auto& r : records)
        j["records"].push_back(record_to_json(r));
    j["aggregates"] = json::array();
    for (const auto& a : aggregate_records(records))
    {
        json ja;
        ja["strategy"] = a.strategy;
        ja["n"] = a.n;
        ja["m"] = a.m;
        ja["p_tr_dbw"] = a.p_tr_dbw;
        ja["channels"] = a.channels;
        ja["failures"] = a.failures;
        ja["zdc_mean"] = a.zdc_mean;
        ja["papr_mean"] = a.papr_mean;
        j["aggregates"].push_back(ja);
    }
    return j.dump(2);
}

std::vector<SweepRecord> parse_records_json(const std::string& json_text)
{
    const json j = json::parse(json_text);
    std::vector<SweepRecord> out;
    for (const auto& jr : j.at("records"))
    {
        SweepRecord r;
        r.strategy = jr.at("strategy").get<std::string>();
        r.n = jr.at("n").get<Index>();
        r.m = jr.at("m").get<Index>();
        r.p_tr_dbw = jr.at("p_tr_dbw").get<double>();
        r.channel = jr.at("channel").get<Index>();
        // NaN serializes as null
        r.zdc = jr.at("zdc").is_null() ? quiet_nan : jr.at("zdc").get<double>();
        r.papr = jr.at("papr").is_null() ? quiet_nan : jr.at("papr").get<double>();
        r.iters = jr.at("iters").get<Index>();
        r.ms = jr.at("ms").is_null() ? quiet_nan : jr.at("ms").get<double>();
        r.error = jr.at("error").get<std::string>();
        out.push_back(std::move(r));
    }
    return out;
}

void emit_results(const std::vector<SweepRecord>& records, const ExperimentConfig& cfg,
                  const std::string& path, const std::string& format)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("emit_results: cannot open '" + path + "' for writing");
    if (format == "csv")
        emit_csv(records, out);
    else if (format == "json")
        out << records_to_json(records, cfg) << '\n';
    else
        throw std::invalid_argument("emit_results: format must be csv or json");
    if (!out)
        throw std::runtime_error("emit_results: write to '" + path + "' failed");
}

ExperimentConfig parse_config(const std::string& json_text)
{
    const json j = json::parse(json_text);
    ExperimentConfig cfg;
    expect_keys(j, "top level",
                {"tones", "sspa", "rectenna", "budgets", "strategies", "num_channels", "seed",
                 "solver", "output_path"});

    if (j.contains("tones"))
    {
        const json& t = j["tones"];
        expect_keys(t, "tones", {"n", "m", "f0_hz", "delta_f_hz"});
        if (t.contains("n"))
        {
            cfg.n_list.clear();
            if (t["n"].is_array())
                for (const auto& v : t["n"])
                    cfg.n_list.push_back(v.get<Index>());
            else
                cfg.n_list.push_back(t["n"].get<Index>());
        }
        if (t.contains("m"))
            cfg.m = t["m"].get<Index>();
        if (t.contains("f0_hz"))
            cfg.f0_hz = t["f0_hz"].get<double>();
        if (t.contains("delta_f_hz"))
            cfg.delta_f_hz = t["delta_f_hz"].get<double>();
    }
    if (j.contains("sspa"))
    {
        const json& s = j["sspa"];
        expect_keys(s, "sspa", {"gain", "a_s_dbv", "beta"});
        if (s.contains("gain"))
            cfg.sspa_gain = s["gain"].get<double>();
        if (s.contains("a_s_dbv"))
            cfg.sspa_a_s_dbv = s["a_s_dbv"].get<double>();
        if (s.contains("beta"))
            cfg.sspa_beta = s["beta"].get<double>();
    }
    if (j.contains("rectenna"))
    {
        const json& r = j["rectenna"];
        expect_keys(r, "rectenna", {"i_s", "eta0", "v0", "r_ant"});
        RectennaParams p = cfg.rectenna;
        if (r.contains("i_s"))
            p.saturation_current = r["i_s"].get<double>();
        if (r.contains("eta0"))
            p.ideality = r["eta0"].get<double>();
        if (r.contains("v0"))
            p.thermal_voltage = r["v0"].get<double>();
        if (r.contains("r_ant"))
            p.antenna_impedance = r["r_ant"].get<double>();
        cfg.rectenna = RectennaParams(p.saturation_current, p.ideality, p.thermal_voltage,
                                      p.antenna_impedance);
    }
    if (j.contains("budgets"))
    {
        const json& b = j["budgets"];
        expect_keys(b, "budgets", {"p_in_dbw", "p_tr_dbw"});
        if (b.contains("p_in_dbw"))
            cfg.p_in_dbw = b["p_in_dbw"].get<double>();
        if (b.contains("p_tr_dbw"))
        {
            cfg.p_tr_dbw.clear();
            if (b["p_tr_dbw"].is_array())
                for (const auto& v : b["p_tr_dbw"])
                    cfg.p_tr_dbw.push_back(v.get<double>());
            else
                cfg.p_tr_dbw.push_back(b["p_tr_dbw"].get<double>());
        }
    }
    if (j.contains("strategies"))
    {
        cfg.strategies.clear();
        for (const auto& s : j["strategies"])
            cfg.strategies.push_back(s.get<std::string>());
    }
    if (j.contains("num_channels"))
        cfg.num_channels = j["num_channels"].get<Index>();
    if (j.contains("seed"))
        cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("solver"))
    {
        const json& s = j["solver"];
        expect_keys(s, "solver",
                    {"scp_tol", "scp_max_iters", "barrier_t0", "barrier_mu", "barrier_tol",
                     "newton_tol", "newton_max_iters", "line_search_backtrack", "armijo_c",
                     "feasibility_margin", "oversampling"});
        SolverConfig& c = cfg.solver;
        if (s.contains("scp_tol"))
            c.scp_tol = s["scp_tol"].get<double>();
        if (s.contains("scp_max_iters"))
            c.scp_max_iters = s["scp_max_iters"].get<Index>();
        if (s.contains("barrier_t0"))
            c.barrier_t0 = s["barrier_t0"].get<double>();
        if (s.contains("barrier_mu"))
            c.barrier_mu = s["barrier_mu"].get<double>();
        if (s.contains("barrier_tol"))
            c.barrier_tol = s["barrier_tol"].get<double>();
        if (s.contains("newton_tol"))
            c.newton_tol = s["newton_tol"].get<double>();
        if (s.contains("newton_max_iters"))
            c.newton_max_iters = s["newton_max_iters"].get<Index>();
        if (s.contains("line_search_backtrack"))
            c.line_search_backtrack = s["line_search_backtrack"].get<double>();
        if (s.contains("armijo_c"))
            c.armijo_c = s["armijo_c"].get<double>();
        if (s.contains("feasibility_margin"))
            c.feasibility_margin = s["feasibility_margin"].get<double>();
        if (s.contains("oversampling"))
            c.oversampling = s["oversampling"].get<Index>();
    }
    if (j.contains("output_path"))
        cfg.output_path = j["output_path"].get<std::string>();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg)
{
    json j;
    j["tones"] = {{"n", cfg.n_list}, {"m", cfg.m}, {"f0_hz", cfg.f0_hz},
                  {"delta_f_hz", cfg.delta_f_hz}};
    j["sspa"] = {{"gain", cfg.sspa_gain}, {"a_s_dbv", cfg.sspa_a_s_dbv},
                 {"beta", cfg.sspa_beta}};
    j["rectenna"] = {{"i_s", cfg.rectenna.saturation_current},
                     {"eta0", cfg.rectenna.ideality},
                     {"v0", cfg.rectenna.thermal_voltage},
                     {"r_ant", cfg.rectenna.antenna_impedance}};
    j["budgets"] = {{"p_in_dbw", cfg.p_in_dbw}, {"p_tr_dbw", cfg.p_tr_dbw}};
    j["strategies"] = cfg.strategies;
    j["num_channels"] = cfg.num_channels;
    j["seed"] = cfg.seed;
    j["solver"] = {{"scp_tol", cfg.solver.scp_tol},
                   {"scp_max_iters", cfg.solver.scp_max_iters},
                   {"barrier_t0", cfg.solver.barrier_t0},
                   {"barrier_mu", cfg.solver.barrier_mu},
                   {"barrier_tol", cfg.solver.barrier_tol},
                   {"newton_tol", cfg.solver.newton_tol},
                   {"newton_max_iters", cfg.solver.newton_max_iters},
                   {"line_search_backtrack", cfg.solver.line_search_backtrack},
                   {"armijo_c", cfg.solver.armijo_c},
                   {"feasibility_margin", cfg.solver.feasibility_margin},
                   {"oversampling", cfg.solver.oversampling}};
    j["output_path"] = cfg.output_path;
    return j.dump(2);
}

int run_self_checks(std::ostream& out)
{
    int failures = 0;
    const auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        out << (ok ? "[ ok ] " : "[FAIL] ") << name;
        if (!ok && !detail.empty())
            out << " (" << detail << ")";
        out << '\n';
        if (!ok)
            ++failures;
    };

    const RectennaParams rect(5e-6, 1.05, 25.86e-3, 50.0);
    const auto diode = diode_coefficients(rect);
    const SspaParams sspa(1.0, dbv_to_volts(-35.0), 1.0);
    const PowerBudgets budgets(dbw_to_watts(-20.0), dbw_to_watts(-40.0));
    SolverConfig solver;

    const auto random_weights = [](Index n, Index m, std::uint64_t key, double scale) {
        CMatrix w = generate_channel(n, m, key, 0);
        return CMatrix(scale * w);
    };
    const auto fd_gradient = [](const std::function<double(const CMatrix&)>& f,
                                const CMatrix& w, double step) {
        const RVector x0 = stack_weights(w);
        RVector g(x0.size());
        for (Index i = 0; i < x0.size(); ++i)
        {
            RVector xp = x0, xm = x0;
            xp(i) += step;
            xm(i) -= step;
            g(i) = (f(unstack_weights(xp, w.rows(), w.cols()))
                    - f(unstack_weights(xm, w.rows(), w.cols())))
                   / (2.0 * step);
        }
        return g;
    };

    // scaling-term routes
    {
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 25; ++i)
        {
            const Index n = 1 + Index(i % 8);
            const Index m = 1 + Index(i % 3);
            const ToneGrid tones(n, m, 5.18e9, 312.5e3);
            const CMatrix h = generate_channel(n, m, 11, i);
            const CMatrix w = random_weights(n, m, 12 + i, 0.1);
            const CVector s = effective_weights(h, w);
            const double fast = zdc(s, diode, rect.antenna_impedance);
            const double slow = zdc_time_oracle(s, diode, rect.antenna_impedance, tones,
                                                make_time_grid(tones));
            worst = std::max(worst, std::abs(fast - slow) / std::max(1e-300, std::abs(slow)));
        }
        report("scaling term: frequency vs time-domain route", worst <= 1e-10,
               "relative error " + fmt(worst));
    }

    // zdc gradient
    {
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 5; ++i)
        {
            const ToneGrid tones(4, 2, 5.18e9, 312.5e3);
            const CMatrix h = generate_channel(4, 2, 21, i);
            const CMatrix w = random_weights(4, 2, 22 + i, 0.5);
            const RVector a = zdc_gradient(h, w, diode, rect.antenna_impedance).stacked();
            const RVector fd = fd_gradient(
                [&](const CMatrix& x) {
                    return zdc(effective_weights(h, x), diode, rect.antenna_impedance);
                },
                w, 1e-6);
            worst = std::max(worst, (a - fd).norm() / fd.norm());
        }
        report("harvested-DC gradient vs finite differences", worst <= 1e-6,
               "relative error " + fmt(worst));
    }

    // constraint gradients
    {
        const ToneGrid tones(4, 1, 5.18e9, 312.5e3);
        const TimeGrid grid = make_time_grid(tones);
        double worst1 = 0.0, worst2 = 0.0;
        for (std::uint64_t i = 0; i < 5; ++i)
        {
            const CMatrix h = generate_channel(4, 1, 31, i);
            SolverConfig margin_cfg = solver;
            margin_cfg.feasibility_margin = 0.5;
            const CMatrix w = feasible_start(h, budgets, sspa, tones, margin_cfg);

            const auto c1 = constraint_f1(w, budgets);
            const RVector fd1 = fd_gradient(
                [&](const CMatrix& x) { return constraint_f1(x, budgets).value; }, w, 1e-7);
            worst1 = std::max(worst1, (c1.gradient - fd1).norm() / (1.0 + fd1.norm()));

            const auto c2 = constraint_f2(w, sspa, budgets, tones, grid);
            const RVector fd2 = fd_gradient(
                [&](const CMatrix& x) {
                    return constraint_f2(x, sspa, budgets, tones, grid).value;
                },
                w, 1e-9);
            worst2 = std::max(worst2, (c2.gradient - fd2).norm() / fd2.norm());
        }
        report("transmit-power constraint gradient", worst1 <= 1e-8, fmt(worst1));
        report("input-power constraint gradient", worst2 <= 1e-5, fmt(worst2));
    }

    // barrier objective gradient
    {
        const ToneGrid tones(3, 1, 5.18e9, 312.5e3);
        const TimeGrid grid = make_time_grid(tones);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 5; ++i)
        {
            const CMatrix h = generate_channel(3, 1, 41, i);
            SolverConfig margin_cfg = solver;
            margin_cfg.feasibility_margin = 0.5;
            const CMatrix w = feasible_start(h, budgets, sspa, tones, margin_cfg);
            const TaylorCoefficients taylor =
                zdc_gradient(h, w, diode, rect.antenna_impedance);
            const auto b = barrier_objective(w, taylor, 3.0, budgets, sspa, tones, grid);
            if (!b)
            {
                worst = 1.0;
                break;
            }
            const RVector fd = fd_gradient(
                [&](const CMatrix& x) {
                    const auto e = barrier_objective(x, taylor, 3.0, budgets, sspa, tones, grid);
                    return e ? e->value : quiet_nan;
                },
                w, 1e-9);
            worst = std::max(worst, (b->gradient - fd).norm() / fd.norm());
        }
        report("barrier objective gradient", worst <= 1e-6, fmt(worst));
    }

    // amplifier round trip and linear limit
    {
        SplitMix64 rng(5150);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i)
        {
            const double a = rng.uniform() * 0.999 * sspa.saturation;
            const double back = amam_forward(amam_inverse(a, sspa), sspa);
            if (a > 0.0)
                worst = std::max(worst, std::abs(back - a) / a);
        }
        report("amplifier forward/inverse round trip", worst <= 1e-12, fmt(worst));

        const ToneGrid tones(5, 1, 5.18e9, 312.5e3);
        const SspaParams linearish(1.0, 1e6, 1.0);
        const CMatrix w = random_weights(5, 1, 51, 1.0);
        const double need = required_input_power(w, linearish, tones, make_time_grid(tones));
        const double rel = std::abs(need - average_power(w)) / average_power(w);
        report("linear-limit required input power", rel <= 1e-6, fmt(rel));
    }

    return failures;
}

} // namespace wpt
