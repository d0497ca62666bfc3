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
#include "tsotfs/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tsotfs::harness {

struct Scenario {
    std::vector<channel::TerminalConfig> terminals;     // all K
    std::vector<channel::ChannelRealization> links;     // active terminals, ascending id
    std::vector<int> active;                            // ascending ids

    std::vector<bool> activity() const {
        std::vector<bool> a(terminals.size(), false);
        for (int k : active) a[k] = true;
        return a;
    }
};

/// Smallest absolute difference of two azimuths on the circle, degrees.
inline double azimuth_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

inline bool spacing_ok(const channel::TerminalConfig& a, const channel::TerminalConfig& b, const SystemConfig& cfg) {
    return std::abs(a.zenith_deg - b.zenith_deg) >= cfg.min_zenith_spacing_deg ||
           azimuth_distance(a.azimuth_deg, b.azimuth_deg) >= cfg.min_azimuth_spacing_deg;
}

inline constexpr int kMaxPlacementAttempts = 100000;

/// K terminals at random directions, exactly Ka of them active; active
/// directions are redrawn until every active pair honours the spacing rule.
inline Scenario generate_scenario(const SystemConfig& cfg, numerics::RngStream& rng, bool zero_doppler = false) {
    cfg.validate();
    Scenario s;
    s.terminals.resize(cfg.K);

    std::vector<int> ids(cfg.K);
    for (int k = 0; k < cfg.K; ++k) ids[k] = k;
    for (int i = 0; i < cfg.Ka; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, cfg.K - 1));
        std::swap(ids[i], ids[j]);
    }
    std::vector<bool> is_active(cfg.K, false);
    for (int i = 0; i < cfg.Ka; ++i) is_active[ids[i]] = true;

    for (int k = 0; k < cfg.K; ++k) {
        auto& t = s.terminals[k];
        t.id = k;
        t.active = is_active[k];
        t.tx_power_dbm = cfg.tx_power_dbm;
        t.rician_factor_db = cfg.rician_factor_db;
        t.nlos_count = cfg.nlos_paths;
        t.speed_mps = zero_doppler ? 0.0 : rng.uniform(0.0, cfg.max_terminal_speed_mps);
        int attempts = 0;
        for (;;) {
            t.zenith_deg = rng.uniform(0.0, cfg.max_zenith_deg);
            t.azimuth_deg = rng.uniform(0.0, 360.0);
            if (!t.active) break;
            bool ok = true;
            for (int j = 0; j < k && ok; ++j)
                if (s.terminals[j].active) ok = spacing_ok(t, s.terminals[j], cfg);
            if (ok) break;
            if (++attempts >= kMaxPlacementAttempts)
                throw std::runtime_error("generate_scenario: cannot place active terminals under the spacing rule");
        }
    }
    for (int k = 0; k < cfg.K; ++k) {
        if (!s.terminals[k].active) continue;
        s.active.push_back(k);
        auto ch = channel::generate_tsl(s.terminals[k], cfg, rng);
        if (zero_doppler)
            for (auto& p : ch.paths) p.doppler = 0.0;
        s.links.push_back(std::move(ch));
    }
    return s;
}

}  // namespace tsotfs::harness
