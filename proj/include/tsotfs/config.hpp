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

#include <stdexcept>
#include <string>

namespace tsotfs {

/// Frame, array and RF constants shared by every stage of the chain.
///
/// Sample-domain quantities (G, frame length, T) are derived from the
/// primary fields and never stored separately.
struct SystemConfig {
    // frame
    int M = 64;    // delay bins (samples per OTFS symbol)
    int N = 8;     // Doppler bins (OTFS symbols per frame)
    int Mt = 18;   // training-sequence length
    int L = 9;     // CIR length, max delay tap is L-1
    int bits_per_symbol = 2;

    // RF
    double subcarrier_spacing_hz = 480e3;
    double carrier_hz = 10e9;

    // satellite UPA
    int Px = 4;
    int Py = 4;

    // population
    int K = 50;
    int Ka = 5;
    int nlos_paths = 0;          // Q_k for every terminal
    int nlos_excess_taps = 4;    // NLoS taps lie in (l_LoS, l_LoS + excess]
    double rician_factor_db = 8.0;
    double tx_power_dbm = 40.0;
    double max_terminal_speed_mps = 10.0;
    bool zenith_pathloss = true;  // scale received power by the slant-range FSPL
    bool gaussian_los_gain = false;  // LoS gain ~ CN(0,1) instead of unit modulus, random phase

    // receiver
    double activity_beta = 0.1;
    double somp_threshold_factor = 1.05;  // pi_th = factor * sigma_w^2
    int somp_max_iter = 30;
    bool somp_rank_aware = false;          // rank-aware atom selection instead of plain correlation
    double somp_noiseless_floor = 1e-20;  // pi_th used when sigma_w^2 == 0
    int doppler_refine_passes = 2;        // extra decoupled ESPRIT passes, 0 = single pass
    double lsqr_tol = 1e-8;
    int lsqr_max_iter = 200;

    // scenario spacing constraint between active terminals (degrees)
    double min_zenith_spacing_deg = 14.4;
    double min_azimuth_spacing_deg = 14.3;
    double max_zenith_deg = 44.7;

    // orbit
    double earth_radius_m = 6371e3;
    double altitude_m = 500e3;
    double satellite_speed_mps = 7.58e3;

    int G() const { return Mt - L + 1; }
    int antennas() const { return Px * Py; }
    int block_len() const { return M + Mt; }
    int frame_len() const { return Mt * (N + 1) + M * N; }
    int payload_len() const { return M * N; }
    double bandwidth_hz() const { return M * subcarrier_spacing_hz; }
    double sample_period_s() const { return 1.0 / bandwidth_hz(); }
    double symbol_duration_s() const { return block_len() * sample_period_s(); }
    // N(M+Mt): denominator of the per-sample Doppler phase
    double doppler_phase_denominator() const { return static_cast<double>(N) * block_len(); }
    int bits_per_terminal() const { return M * N * bits_per_symbol; }

    void validate() const {
        auto fail = [](const std::string& what) { throw std::invalid_argument("SystemConfig: " + what); };
        if (M < 1 || N < 1) fail("M and N must be >= 1");
        if (L < 1) fail("L must be >= 1");
        if (Mt < L) fail("Mt must be >= L so that G = Mt - L + 1 >= 1");
        if (L - 1 > M) fail("L - 1 must not exceed M (payload trailing must fit one block)");
        if (Px < 1 || Py < 1) fail("array dimensions must be >= 1");
        if (K < 1) fail("K must be >= 1");
        if (Ka < 0 || Ka > K) fail("Ka must lie in [0, K]");
        if (nlos_paths < 0) fail("nlos_paths must be >= 0");
        if (nlos_paths >= L) fail("nlos_paths must be < L so delay taps stay distinct");
        if (nlos_paths > 0 && (nlos_excess_taps < nlos_paths || nlos_excess_taps > L - 1))
            fail("nlos_excess_taps must lie in [nlos_paths, L-1]");
        if (bits_per_symbol != 1 && (bits_per_symbol < 2 || bits_per_symbol % 2 != 0 || bits_per_symbol > 12))
            fail("bits_per_symbol must be 1 or an even number in [2, 12]");
        if (!(activity_beta > 0.0) || activity_beta > 1.0) fail("activity_beta must lie in (0, 1]");
        if (!(somp_threshold_factor > 0.0)) fail("somp_threshold_factor must be > 0");
        if (!(somp_noiseless_floor > 0.0)) fail("somp_noiseless_floor must be > 0");
        if (somp_max_iter < 1) fail("somp_max_iter must be >= 1");
        if (doppler_refine_passes < 0) fail("doppler_refine_passes must be >= 0");
        if (!(lsqr_tol > 0.0) || lsqr_max_iter < 1) fail("lsqr_tol > 0 and lsqr_max_iter >= 1 required");
        if (!(subcarrier_spacing_hz > 0.0) || !(carrier_hz > 0.0)) fail("RF frequencies must be > 0");
        if (!(altitude_m > 0.0) || !(satellite_speed_mps > 0.0) || !(earth_radius_m > 0.0))
            fail("orbit parameters must be > 0");
    }
};

/// Laptop-sized profile: every acceptance check runs in minutes on one core.
inline SystemConfig desk_profile() { return SystemConfig{}; }

/// Desk profile with G = 40 non-ISI samples per TS. The wider subcarrier
/// spacing keeps the coverage-edge Doppler below N/2 with the longer TS.
inline SystemConfig desk_g40_profile() {
    SystemConfig c;
    c.Mt = 48;
    c.subcarrier_spacing_hz = 960e3;
    return c;
}

/// Full-size system: 32x32 UPA, 122.88 MHz bandwidth.
inline SystemConfig paper_profile() {
    SystemConfig c;
    c.M = 256;
    c.N = 8;
    c.L = 33;
    c.Mt = 72;  // G = 40
    c.Px = 32;
    c.Py = 32;
    c.K = 100;
    c.Ka = 10;
    c.nlos_excess_taps = 8;
    return c;
}

inline SystemConfig profile_by_name(const std::string& name) {
    if (name == "desk") return desk_profile();
    if (name == "desk-g40") return desk_g40_profile();
    if (name == "paper") return paper_profile();
    throw std::invalid_argument("unknown profile '" + name + "' (expected desk, desk-g40 or paper)");
}

}  // namespace tsotfs
