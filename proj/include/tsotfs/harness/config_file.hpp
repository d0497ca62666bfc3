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
#include "tsotfs/harness/sweep.hpp"
#include "tsotfs/harness/trial.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

namespace tsotfs::harness {

/// Config error carrying a 1-based file position: "file:line:col: message".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, int column, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Everything a config file may describe.
struct RunConfig {
    std::string profile = "desk";
    ExperimentConfig experiment;
    std::vector<channel::LinkBudgetCase> link_budget = channel::reference_link_budget_cases();
};

namespace detail {

class YamlReader {
public:
    explicit YamlReader(std::string file) : file_(std::move(file)) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const {
        const auto m = n.Mark();
        throw ConfigError(file_, m.line + 1, m.column + 1, msg);
    }
    [[noreturn]] void fail(const YAML::Mark& m, const std::string& msg) const {
        throw ConfigError(file_, m.line + 1, m.column + 1, msg);
    }

    template <class T>
    T scalar(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + key + "' has an invalid value '" + n.Scalar() + "'");
        }
    }

    using Setter = std::function<void(const YAML::Node&, const std::string&)>;

    void map(const YAML::Node& section, const std::string& name, const std::map<std::string, Setter>& fields) const {
        if (!section.IsMap()) fail(section, "section '" + name + "' must be a mapping");
        for (auto it = section.begin(); it != section.end(); ++it) {
            const std::string key = it->first.as<std::string>();
            const auto f = fields.find(key);
            if (f == fields.end()) fail(it->first, "unknown key '" + key + "' in section '" + name + "'");
            f->second(it->second, key);
        }
    }

    template <class T>
    Setter set(T& target) const {
        return [this, &target](const YAML::Node& n, const std::string& key) { target = scalar<T>(n, key); };
    }

private:
    std::string file_;
};

inline std::map<std::string, YamlReader::Setter> system_fields(const YamlReader& r, SystemConfig& c) {
    return {
        {"M", r.set(c.M)},
        {"N", r.set(c.N)},
        {"Mt", r.set(c.Mt)},
        {"L", r.set(c.L)},
        {"bits_per_symbol", r.set(c.bits_per_symbol)},
        {"subcarrier_spacing_hz", r.set(c.subcarrier_spacing_hz)},
        {"carrier_hz", r.set(c.carrier_hz)},
        {"Px", r.set(c.Px)},
        {"Py", r.set(c.Py)},
        {"K", r.set(c.K)},
        {"Ka", r.set(c.Ka)},
        {"nlos_paths", r.set(c.nlos_paths)},
        {"nlos_excess_taps", r.set(c.nlos_excess_taps)},
        {"rician_factor_db", r.set(c.rician_factor_db)},
        {"tx_power_dbm", r.set(c.tx_power_dbm)},
        {"max_terminal_speed_mps", r.set(c.max_terminal_speed_mps)},
        {"zenith_pathloss", r.set(c.zenith_pathloss)},
        {"gaussian_los_gain", r.set(c.gaussian_los_gain)},
        {"activity_beta", r.set(c.activity_beta)},
        {"somp_threshold_factor", r.set(c.somp_threshold_factor)},
        {"somp_max_iter", r.set(c.somp_max_iter)},
        {"somp_rank_aware", r.set(c.somp_rank_aware)},
        {"somp_noiseless_floor", r.set(c.somp_noiseless_floor)},
        {"doppler_refine_passes", r.set(c.doppler_refine_passes)},
        {"lsqr_tol", r.set(c.lsqr_tol)},
        {"lsqr_max_iter", r.set(c.lsqr_max_iter)},
        {"min_zenith_spacing_deg", r.set(c.min_zenith_spacing_deg)},
        {"min_azimuth_spacing_deg", r.set(c.min_azimuth_spacing_deg)},
        {"max_zenith_deg", r.set(c.max_zenith_deg)},
        {"earth_radius_m", r.set(c.earth_radius_m)},
        {"altitude_m", r.set(c.altitude_m)},
        {"satellite_speed_mps", r.set(c.satellite_speed_mps)},
    };
}

}  // namespace detail

/// Parses YAML text. `file` only labels diagnostics. `profile_override`
/// replaces the file's `profile` key when set.
inline RunConfig parse_run_config(const std::string& text, const std::string& file = "<config>",
                                  const std::optional<std::string>& profile_override = std::nullopt) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(file, e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    const detail::YamlReader r(file);
    RunConfig rc;
    if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    if (!root.IsMap()) r.fail(root, "top level must be a mapping");

    static const std::vector<std::string> sections{"profile", "system", "noise", "trial", "experiment", "link_budget"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        const auto key = it->first.as<std::string>();
        if (std::find(sections.begin(), sections.end(), key) == sections.end())
            r.fail(it->first, "unknown top-level key '" + key + "'");
    }

    if (root["profile"]) rc.profile = r.scalar<std::string>(root["profile"], "profile");
    if (profile_override) rc.profile = *profile_override;
    try {
        rc.experiment.system = profile_by_name(rc.profile);
    } catch (const std::invalid_argument& e) {
        if (root["profile"] && !profile_override) r.fail(root["profile"], e.what());
        throw ConfigError(file, 1, 1, e.what());
    }
    auto& sys = rc.experiment.system;
    if (const auto n = root["system"]) {
        r.map(n, "system", detail::system_fields(r, sys));
        try {
            sys.validate();
        } catch (const std::invalid_argument& e) {
            r.fail(n, e.what());
        }
    }
    rc.experiment.values = {static_cast<double>(sys.G())};

    auto& opt = rc.experiment.trial;
    if (const auto n = root["noise"]) {
        std::string mode = to_string(opt.noise);
        r.map(n, "noise",
              {{"mode", r.set(mode)}, {"snr_db", r.set(opt.snr_db)}, {"variance", r.set(opt.noise_variance)}});
        try {
            opt.noise = noise_mode_from_string(mode);
        } catch (const std::invalid_argument& e) {
            r.fail(n["mode"], e.what());
        }
        if (opt.noise_variance < 0.0) r.fail(n["variance"], "noise variance must be >= 0");
    }
    if (const auto n = root["trial"]) {
        r.map(n, "trial",
              {{"zero_doppler", r.set(opt.zero_doppler)},
               {"genie_csi", r.set(opt.genie_csi)},
               {"detect", r.set(opt.detect)},
               {"oracle", r.set(opt.oracle)},
               {"coarse", r.set(opt.coarse)}});
    }

    auto& exp = rc.experiment;
    if (const auto n = root["experiment"]) {
        std::string axis = to_string(exp.axis);
        bool values_given = false;
        YAML::Mark values_mark;
        r.map(n, "experiment",
              {{"axis", r.set(axis)},
               {"values",
                [&](const YAML::Node& v, const std::string& key) {
                    if (!v.IsSequence()) r.fail(v, "'" + key + "' must be a list");
                    exp.values.clear();
                    for (const auto& e : v) exp.values.push_back(r.scalar<double>(e, key));
                    values_given = true;
                    values_mark = v.Mark();
                }},
               {"trials", r.set(exp.trials)},
               {"seed", r.set(exp.seed)},
               {"workers", r.set(exp.workers)},
               {"timing", r.set(exp.timing)}});
        try {
            exp.axis = axis_from_string(axis);
        } catch (const std::invalid_argument& e) {
            r.fail(n["axis"], e.what());
        }
        if (!values_given && exp.axis != SweepAxis::G)
            r.fail(n, "experiment: 'values' is required for axis '" + axis + "'");
        if (exp.trials < 1) r.fail(n["trials"], "experiment: trials must be >= 1");
        if (n["workers"] && exp.workers < 1) r.fail(n["workers"], "experiment: workers must be >= 1");
        try {
            exp.validate();
        } catch (const std::invalid_argument& e) {
            if (values_given) r.fail(values_mark, e.what());
            r.fail(n, e.what());
        }
    }

    if (const auto n = root["link_budget"]) {
        if (!n.IsSequence()) r.fail(n, "'link_budget' must be a list of cases");
        rc.link_budget.clear();
        for (const auto& c : n) {
            channel::LinkBudgetCase lb;
            r.map(c, "link_budget",
                  {{"name", r.set(lb.name)},
                   {"zenith_deg", r.set(lb.zenith_deg)},
                   {"bandwidth_hz", r.set(lb.bandwidth_hz)},
                   {"tx_power_dbm", r.set(lb.tx_power_dbm)},
                   {"tx_gain_db", r.set(lb.tx_gain_db)},
                   {"g_over_t_dbk", r.set(lb.g_over_t_dbk)},
                   {"fspl_db", r.set(lb.fspl_db)},
                   {"atmospheric_db", r.set(lb.atmospheric_db)},
                   {"shadowing_db", r.set(lb.shadowing_db)},
                   {"scintillation_db", r.set(lb.scintillation_db)},
                   {"polarization_db", r.set(lb.polarization_db)},
                   {"additional_losses_db", r.set(lb.additional_losses_db)},
                   {"margin_db", r.set(lb.margin_db)}});
            try {
                lb.validate();
            } catch (const std::invalid_argument& e) {
                r.fail(c, e.what());
            }
            rc.link_budget.push_back(lb);
        }
    }
    return rc;
}

inline RunConfig load_run_config(const std::string& path, const std::optional<std::string>& profile_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path, profile_override);
}

}  // namespace tsotfs::harness
