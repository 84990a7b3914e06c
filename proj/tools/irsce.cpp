// SPDX-License-Identifier: Apache-2.0
//
// irsce: cascaded IRS channel estimation and training design
// Copyright (C) 2026 The irsce authors
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

#include "irsce/harness/config.hpp"
#include "irsce/harness/experiment.hpp"
#include "irsce/harness/record_io.hpp"
#include "irsce/harness/selftest.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_runtime = 3;

using namespace irsce;
using namespace irsce::harness;

// Same draw as trial 0 of the first proposed cell.
void dump_record(const Scenario &sc, const ExperimentConfig &cfg, const CVector<double> &vartheta, const std::string &prefix)
{
    const double noise = cfg.noise_power() / std::pow(10.0, cfg.power_dbm.front() / 10.0);
    Rng rng(derive_seed(cfg.seed, scheme_stream(Scheme::proposed), std::size_t(0), std::size_t(0)));
    const auto pilots = build_pilots<double>(sc.dims.K);
    const auto plan = build_phase_plan(vartheta);
    StoredRecord rec;
    rec.channel = sample_channels(sc.dims, sc.bases, sc.stats, rng);
    rec.record = simulate_training(rec.channel, plan, pilots, noise, rng);
    write_record(prefix, rec);
}

int cmd_run(const std::string &config_path, const std::optional<std::string> &out, const std::optional<std::uint64_t> &seed,
            const std::optional<int> &threads, bool timing, const std::optional<std::string> &dump)
{
    ExperimentConfig cfg = load_config(config_path);
    if (seed)
        cfg.seed = *seed;
    if (threads)
        cfg.threads = *threads;
    if (out)
        cfg.output = *out;
    cfg.validate();

    const Scenario sc = build_scenario(cfg);
    const CVector<double> vartheta = design_steering(sc, cfg).vartheta;
    if (dump)
        dump_record(sc, cfg, vartheta, *dump);

    std::vector<ResultRow> rows;
    for (Scheme s : cfg.schemes)
        for (std::size_t p = 0; p < cfg.power_dbm.size(); ++p)
        {
            rows.push_back(run_cell(sc, cfg, s, p, vartheta, scheme_stream(s), cfg.threads).row);
            const auto &r = rows.back();
            std::clog << r.scheme << " P_T=" << r.power_dbm << " dBm  NMSE=" << r.nmse_db << " dB  failed=" << r.failed
                      << '\n';
        }

    if (cfg.output == "-")
    {
        write_csv(std::cout, rows, timing);
        return exit_ok;
    }
    std::ofstream os(cfg.output, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open output file " + cfg.output);
    write_csv(os, rows, timing);
    return exit_ok;
}

int cmd_phase_opt(const std::string &config_path)
{
    const ExperimentConfig cfg = load_config(config_path);
    const Scenario sc = build_scenario(cfg);
    const auto r = design_steering(sc, cfg);
    std::cout << "schema=1\nseries,index,re,im\n";
    for (Index n = 0; n < r.vartheta.size(); ++n)
        std::cout << "vartheta," << n << ',' << format_double(r.vartheta(n).real()) << ','
                  << format_double(r.vartheta(n).imag()) << '\n';
    for (std::size_t i = 0; i < r.trajectory.size(); ++i)
        std::cout << "f_B," << i << ',' << format_double(r.trajectory[i]) << ",0\n";
    return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"irsce: cascaded IRS channel estimation benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out, dump;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool timing = false;

    auto *run = app.add_subcommand("run", "Run the Monte-Carlo experiment and write a CSV");
    run->add_option("--config", config_path, "Experiment config file")->required();
    run->add_option("--out", out, "Output CSV path ('-' for stdout)");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timing", timing, "Append a wall_time_s column");
    run->add_option("--dump-record", dump, "Write one training record to <prefix>.bin / <prefix>.json");

    std::string phase_config;
    auto *phase = app.add_subcommand("phase-opt", "Print the optimized steering vector and f_B trajectory");
    phase->add_option("--config", phase_config, "Experiment config file")->required();

    auto *self = app.add_subcommand("selftest", "Run the invariant checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (*run)
            return cmd_run(config_path, out, seed, threads, timing, dump);
        if (*phase)
            return cmd_phase_opt(phase_config);
        if (*self)
            return irsce::harness::run_selftest(std::cout) == 0 ? exit_ok : exit_runtime;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error";
        if (e.line() > 0)
            std::cerr << " (line " << e.line() << ")";
        std::cerr << ": " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_ok;
}
