// SPDX-License-Identifier: Apache-2.0
//
// tsotfs: grant-free NOMA over TS-OTFS for LEO terrestrial-satellite links
// Copyright (C) 2026 The tsotfs authors
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

#include "tsotfs/channel.hpp"
#include "tsotfs/config.hpp"
#include "tsotfs/harness/config_file.hpp"
#include "tsotfs/harness/selftest.hpp"
#include "tsotfs/harness/sweep.hpp"
#include "tsotfs/harness/trial.hpp"
#include "tsotfs/modem.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef TSOTFS_VERSION
#define TSOTFS_VERSION "0.0.0"
#endif

namespace tsotfs::harness {

inline nlohmann::json to_json(const SystemConfig& c) {
    return {{"M", c.M},
            {"N", c.N},
            {"Mt", c.Mt},
            {"L", c.L},
            {"G", c.G()},
            {"bits_per_symbol", c.bits_per_symbol},
            {"subcarrier_spacing_hz", c.subcarrier_spacing_hz},
            {"carrier_hz", c.carrier_hz},
            {"Px", c.Px},
            {"Py", c.Py},
            {"K", c.K},
            {"Ka", c.Ka},
            {"nlos_paths", c.nlos_paths},
            {"nlos_excess_taps", c.nlos_excess_taps},
            {"rician_factor_db", c.rician_factor_db},
            {"tx_power_dbm", c.tx_power_dbm},
            {"max_terminal_speed_mps", c.max_terminal_speed_mps},
            {"zenith_pathloss", c.zenith_pathloss},
            {"gaussian_los_gain", c.gaussian_los_gain},
            {"activity_beta", c.activity_beta},
            {"somp_threshold_factor", c.somp_threshold_factor},
            {"somp_max_iter", c.somp_max_iter},
            {"somp_rank_aware", c.somp_rank_aware},
            {"somp_noiseless_floor", c.somp_noiseless_floor},
            {"doppler_refine_passes", c.doppler_refine_passes},
            {"lsqr_tol", c.lsqr_tol},
            {"lsqr_max_iter", c.lsqr_max_iter},
            {"min_zenith_spacing_deg", c.min_zenith_spacing_deg},
            {"min_azimuth_spacing_deg", c.min_azimuth_spacing_deg},
            {"max_zenith_deg", c.max_zenith_deg},
            {"earth_radius_m", c.earth_radius_m},
            {"altitude_m", c.altitude_m},
            {"satellite_speed_mps", c.satellite_speed_mps}};
}

inline nlohmann::json to_json(const ExperimentConfig& e) {
    return {{"system", to_json(e.system)},
            {"axis", to_string(e.axis)},
            {"values", e.values},
            {"trials", e.trials},
            {"seed", e.seed},
            {"workers", e.workers},
            {"noise", {{"mode", to_string(e.trial.noise)}, {"snr_db", e.trial.snr_db}, {"variance", e.trial.noise_variance}}},
            {"trial",
             {{"zero_doppler", e.trial.zero_doppler},
              {"genie_csi", e.trial.genie_csi},
              {"detect", e.trial.detect},
              {"oracle", e.trial.oracle},
              {"coarse", e.trial.coarse}}}};
}

inline nlohmann::json manifest(const std::string& command, const ExperimentConfig& e, const std::vector<SweepRow>& rows,
                               double total_ms) {
    nlohmann::json j;
    j["tool"] = "tsotfs";
    j["version"] = TSOTFS_VERSION;
    j["command"] = command;
    j["config"] = to_json(e);
    j["versions"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"yaml_cpp", "0.7"},
                     {"cli11", CLI11_VERSION},
                     {"compiler", __VERSION__}};
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& r : rows)
        rj.push_back({{"axis_value", r.axis_value},
                      {"trials", r.trials},
                      {"pe", r.pe},
                      {"pe_half_width", r.pe_half_width},
                      {"nmse_db", std::isnan(r.nmse_db) ? nlohmann::json(nullptr) : nlohmann::json(r.nmse_db)},
                      {"nmse_linear_half_width", r.nmse_half_width},
                      {"ber", r.ber},
                      {"ber_half_width", r.ber_half_width},
                      {"oracle_nmse_db",
                       std::isnan(r.oracle_nmse_db) ? nlohmann::json(nullptr) : nlohmann::json(r.oracle_nmse_db)},
                      {"mean_somp_iters", r.mean_somp_iters},
                      {"mean_lsqr_iters", r.mean_lsqr_iters},
                      {"regularized_trials", r.regularized_trials},
                      {"somp_max_iter_trials", r.somp_max_iter_trials},
                      {"wall_ms", r.wall_ms}});
    j["rows"] = rj;
    j["timing"] = {{"total_ms", total_ms}};
    return j;
}

inline void print_link_budget(std::ostream& os, const std::vector<channel::LinkBudgetCase>& cases) {
    char buf[160];
    os << "case      zenith_deg  fspl_db  snr_db\n";
    for (const auto& c : cases) {
        std::snprintf(buf, sizeof buf, "%-9s %10.2f %8.2f %7.2f\n", c.name.c_str(), c.zenith_deg, c.fspl_db,
                      channel::link_budget_snr(c));
        os << buf;
    }
}

inline void print_efficiency(std::ostream& os) {
    char buf[160];
    os << "M    N  L-1  Mt  frame  efficiency\n";
    for (int mt : {52, 62, 72, 82}) {
        SystemConfig c;
        c.M = 256;
        c.N = 8;
        c.L = 33;
        c.Mt = mt;
        std::snprintf(buf, sizeof buf, "%-4d %-2d %-4d %-3d %-6d %.2f%%\n", c.M, c.N, c.L - 1, mt, c.frame_len(),
                      100.0 * modem::transmission_efficiency(c));
        os << buf;
    }
}

inline void print_trial(std::ostream& os, const TrialRecord& r) {
    os << "trial " << r.trial << " seed " << r.seed << " noise_variance " << r.noise_variance << '\n';
    os << "true terminals:";
    for (const auto& ch : r.truth) {
        os << ' ' << ch.terminal << "{nu=" << ch.doppler() << " taps=";
        for (std::size_t q = 0; q < ch.paths.size(); ++q) os << (q ? "," : "") << ch.paths[q].delay;
        os << '}';
    }
    os << "\nestimated terminals:";
    for (const auto& ch : r.estimate) {
        os << ' ' << ch.terminal << "{nu=" << ch.doppler() << " taps=";
        for (std::size_t q = 0; q < ch.paths.size(); ++q) os << (q ? "," : "") << ch.paths[q].delay;
        os << '}';
    }
    const auto& m = r.metrics;
    os << "\npe " << m.pe << " nmse_db " << (m.nmse.valid() ? format_number(10.0 * std::log10(std::max(m.nmse.ratio(), 1e-12))) : "nan")
       << " oracle_nmse_db "
       << (m.oracle_nmse.valid() ? format_number(10.0 * std::log10(std::max(m.oracle_nmse.ratio(), 1e-12))) : "nan")
       << " ber " << m.ber.ber() << " somp_iters " << r.somp_iterations << " lsqr_iters " << r.lsqr_iterations
       << (r.regularized ? " regularized" : "") << '\n';
}

/// Entry point of the `tsotfs` tool. Exit codes: 0 success, 1 a check failed,
/// 2 usage or configuration error.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"tsotfs: grant-free NOMA over TS-OTFS for LEO links"};
    app.require_subcommand(1);
    std::string config_path, out_path, manifest_path, dump_path, profile;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool timing = false;
    std::uint64_t trial_index = 0;

    app.add_option("--config", config_path, "YAML config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "global seed (overrides the config)");
    app.add_option("--out", out_path, "output path (CSV for sweep)");
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--profile", profile, "base profile")->check(CLI::IsMember({"desk", "desk-g40", "paper"}));
    app.add_option("--manifest", manifest_path, "write a JSON run manifest");
    app.add_flag("--timing", timing, "record wall-clock time in the CSV");

    auto* run = app.add_subcommand("run", "single trial with a verbose dump");
    run->add_option("--trial", trial_index, "trial index");
    run->add_option("--dump-somp", dump_path, "write the SOMP iteration dump to a file");
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep to CSV");
    auto* lb = app.add_subcommand("linkbudget", "single-terminal link budget cases");
    auto* eff = app.add_subcommand("efficiency", "transmission efficiency cases");
    auto* self = app.add_subcommand("selftest", "closed-form oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    RunConfig rc;
    try {
        const std::optional<std::string> prof = profile.empty() ? std::nullopt : std::optional<std::string>(profile);
        if (!config_path.empty()) {
            rc = load_run_config(config_path, prof);
        } else {
            rc = parse_run_config("", "<defaults>", prof);
        }
        if (seed) rc.experiment.seed = *seed;
        if (workers) rc.experiment.workers = *workers;
        if (timing) rc.experiment.timing = true;
        rc.experiment.validate();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    auto open_out = [&](std::ofstream& f) -> std::ostream& {
        if (out_path.empty()) return out;
        f.open(out_path);
        if (!f) throw std::runtime_error("cannot open output file '" + out_path + "'");
        return f;
    };

    try {
        std::ofstream file;
        if (*lb) {
            print_link_budget(open_out(file), rc.link_budget);
            return 0;
        }
        if (*eff) {
            print_efficiency(open_out(file));
            return 0;
        }
        if (*self) return run_selftest(open_out(file)) == 0 ? 0 : 1;
        if (*run) {
            const auto& exp = rc.experiment;
            const auto ctx = TrialContext::make(apply_axis(exp.system, exp.axis, exp.values.front()), exp.seed);
            std::ostringstream dump;
            const auto rec = run_trial(ctx, exp.trial, trial_index, &dump);
            std::ostream& os = open_out(file);
            print_trial(os, rec);
            if (dump_path.empty()) {
                os << dump.str();
            } else {
                std::ofstream d(dump_path);
                if (!d) throw std::runtime_error("cannot open dump file '" + dump_path + "'");
                d << dump.str();
            }
            return 0;
        }
        if (*sweep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto rows = run_sweep(rc.experiment);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            write_csv(open_out(file), rows, rc.experiment.timing);
            if (!manifest_path.empty()) {
                std::ofstream m(manifest_path);
                if (!m) throw std::runtime_error("cannot open manifest file '" + manifest_path + "'");
                m << manifest("sweep", rc.experiment, rows, ms).dump(2) << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace tsotfs::harness
