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

#include "tsotfs/config.hpp"
#include "tsotfs/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsotfs::channel {

inline constexpr double kLightSpeed = 299792458.0;
inline constexpr double kBoltzmannDbw = -228.6;  // dBW/K/Hz

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// ---------------------------------------------------------------------------
// Orbit geometry
// ---------------------------------------------------------------------------

struct OrbitGeometry {
    double earth_radius_m = 6371e3;
    double altitude_m = 500e3;
    double angular_velocity_rps = 0.0;
    double carrier_hz = 10e9;
    double light_speed_mps = kLightSpeed;

    static OrbitGeometry from_config(const SystemConfig& c) {
        OrbitGeometry g;
        g.earth_radius_m = c.earth_radius_m;
        g.altitude_m = c.altitude_m;
        g.angular_velocity_rps = c.satellite_speed_mps / (c.earth_radius_m + c.altitude_m);
        g.carrier_hz = c.carrier_hz;
        g.validate();
        return g;
    }

    double orbit_radius() const { return earth_radius_m + altitude_m; }
    double ground_speed() const { return angular_velocity_rps * orbit_radius(); }

    void validate() const {
        if (!(altitude_m > 0.0)) throw std::invalid_argument("OrbitGeometry: altitude must be > 0");
        if (!(angular_velocity_rps > 0.0)) throw std::invalid_argument("OrbitGeometry: angular velocity must be > 0");
    }
};

// Satellite position and terminal-to-satellite vector in the orbital plane;
// the terminal sits at (0, 0, -R_E) and t = 0 is the closest approach.
inline std::array<double, 3> satellite_position(double t, const OrbitGeometry& g) {
    const double r = g.orbit_radius();
    const double w = g.angular_velocity_rps * t;
    return {r * std::sin(w), 0.0, -r * std::cos(w)};
}

inline std::array<double, 3> link_vector(double t, const OrbitGeometry& g) {
    const double r = g.orbit_radius();
    const double w = g.angular_velocity_rps * t;
    return {r * std::sin(w), 0.0, g.earth_radius_m - r * std::cos(w)};
}

inline double norm3(const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Closed-form Doppler as a function of elevation angle: (f_c/c) w R_E cos(theta).
inline double doppler_at(double elevation_rad, const OrbitGeometry& g) {
    return g.carrier_hz / g.light_speed_mps * g.angular_velocity_rps * g.earth_radius_m * std::cos(elevation_rad);
}

/// Vector-form Doppler: (f_c/c) * d/|d| . dx_sat/dt.
inline double doppler_vector_form(double t, const OrbitGeometry& g) {
    const auto d = link_vector(t, g);
    const double r = g.orbit_radius();
    const double w = g.angular_velocity_rps;
    const std::array<double, 3> vel{r * w * std::cos(w * t), 0.0, r * w * std::sin(w * t)};
    const double dn = norm3(d);
    return g.carrier_hz / g.light_speed_mps * (d[0] * vel[0] + d[1] * vel[1] + d[2] * vel[2]) / dn;
}

/// Elevation of the satellite seen from the terminal at time t.
inline double elevation_at(double t, const OrbitGeometry& g) {
    const auto d = link_vector(t, g);
    // local zenith of the terminal is -z
    const double s = -d[2] / norm3(d);
    return std::asin(std::clamp(s, -1.0, 1.0));
}

/// Elevation angle at the terminal for a given off-nadir angle at the satellite.
inline double elevation_from_nadir(double nadir_rad, const OrbitGeometry& g) {
    const double c = g.orbit_radius() / g.earth_radius_m * std::sin(std::abs(nadir_rad));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// (|d(t)| - |d_0|)/c, d_0 the closest-approach link vector.
inline double relative_delay_at(double t, const OrbitGeometry& g) {
    return (norm3(link_vector(t, g)) - norm3(link_vector(0.0, g))) / g.light_speed_mps;
}

// ---------------------------------------------------------------------------
// Array response
// ---------------------------------------------------------------------------

/// Half-wavelength UPA steering vector, index p = p1 * Py + p2, unit l2-norm.
inline ComplexVector steering_vector(double zenith_deg, double azimuth_deg, int Px, int Py) {
    if (Px < 1 || Py < 1) throw std::invalid_argument("steering_vector: array dimensions must be >= 1");
    const double sz = std::sin(deg2rad(zenith_deg));
    const double ux = sz * std::cos(deg2rad(azimuth_deg));
    const double uy = sz * std::sin(deg2rad(azimuth_deg));
    const double scale = 1.0 / std::sqrt(static_cast<double>(Px * Py));
    ComplexVector v(Px * Py);
    for (int p1 = 0; p1 < Px; ++p1)
        for (int p2 = 0; p2 < Py; ++p2)
            v(p1 * Py + p2) = scale * numerics::cis(-kPi * (ux * p1 + uy * p2));
    return v;
}

// ---------------------------------------------------------------------------
// Link realizations
// ---------------------------------------------------------------------------

struct TerminalConfig {
    int id = 0;  // 0-based, 0..K-1
    double zenith_deg = 0.0;
    double azimuth_deg = 0.0;
    double speed_mps = 0.0;
    double tx_power_dbm = 40.0;
    double rician_factor_db = 8.0;
    int nlos_count = 0;
    bool active = false;
};

struct PathTap {
    int delay = 0;             // integer sample tap
    double doppler = 0.0;      // normalized, nu * N * T
    ComplexVector gain;        // effective per-antenna gain, length P
};

/// One terminal's link: paths[0] is LoS, all paths carry the same Doppler.
struct ChannelRealization {
    int terminal = 0;
    std::vector<PathTap> paths;
    bool rician_weighted = true;

    double doppler() const { return paths.empty() ? 0.0 : paths.front().doppler; }
    int antennas() const { return paths.empty() ? 0 : static_cast<int>(paths.front().gain.size()); }

    double energy() const {
        double e = 0.0;
        for (const auto& p : paths) e += p.gain.squaredNorm();
        return e;
    }
};

/// Relative received power of a terminal w.r.t. a 40 dBm terminal at nadir.
inline double received_power_scale(const TerminalConfig& term, const SystemConfig& cfg) {
    double db = term.tx_power_dbm - 40.0;
    if (cfg.zenith_pathloss) db += 20.0 * std::log10(std::cos(deg2rad(term.zenith_deg)));
    return numerics::from_db10(db);
}

/// Normalized Doppler of a terminal: satellite along-track term plus an
/// optional terminal-motion term (`terminal_offset_hz`).
inline double normalized_doppler(const TerminalConfig& term, const SystemConfig& cfg, double terminal_offset_hz) {
    const double fd_sat = cfg.carrier_hz / kLightSpeed * cfg.satellite_speed_mps *
                          std::sin(deg2rad(term.zenith_deg)) * std::cos(deg2rad(term.azimuth_deg));
    return (fd_sat + terminal_offset_hz) * cfg.N * cfg.symbol_duration_s();
}

// E|g_ABF|^2 for |g_ABF| ~ U[0.3, 1]
inline constexpr double kAbfLow = 0.3;
inline constexpr double kAbfMeanPower = (1.0 - kAbfLow * kAbfLow * kAbfLow) / (3.0 * (1.0 - kAbfLow));

/// Draws one terminal-satellite link (LoS + Q_k NLoS taps, single Doppler).
inline ChannelRealization generate_tsl(const TerminalConfig& term, const SystemConfig& cfg, numerics::RngStream& rng) {
    const int q = term.nlos_count;
    if (q < 0) throw std::invalid_argument("generate_tsl: negative NLoS count");
    if (q >= cfg.L) throw std::invalid_argument("generate_tsl: Q_k >= L, delay taps cannot be distinct");
    const int excess = q > 0 ? cfg.nlos_excess_taps : 0;
    if (q > excess || excess > cfg.L - 1)
        throw std::invalid_argument("generate_tsl: NLoS excess window cannot hold Q_k distinct taps");

    const ComplexVector steer = steering_vector(term.zenith_deg, term.azimuth_deg, cfg.Px, cfg.Py);
    const double amp = std::sqrt(received_power_scale(term, cfg));
    const double gamma = numerics::from_db10(term.rician_factor_db);
    const double w_los = q > 0 ? std::sqrt(gamma / (gamma + 1.0)) : 1.0;
    const double w_nlos = q > 0 ? std::sqrt(1.0 / ((gamma + 1.0) * q * kAbfMeanPower)) : 0.0;

    const double fd_term_max = cfg.carrier_hz * term.speed_mps / kLightSpeed;
    const double offset = fd_term_max > 0.0 ? rng.uniform(-fd_term_max, fd_term_max) : 0.0;
    const double nu = normalized_doppler(term, cfg, offset);
    if (!(std::abs(nu) < cfg.N / 2.0))
        throw std::domain_error("generate_tsl: |normalized Doppler| >= N/2 under this configuration");

    ChannelRealization ch;
    ch.terminal = term.id;
    const int los_delay = static_cast<int>(rng.uniform_int(0, cfg.L - 1 - excess));

    const cd g_los = cfg.gaussian_los_gain ? numerics::complex_gaussian(rng, 1, 1.0)(0)
                                           : numerics::cis(rng.uniform(-kPi, kPi));
    ch.paths.push_back({los_delay, nu, (amp * w_los * g_los) * steer});

    if (q > 0) {
        std::vector<int> excess_taps(excess);
        for (int i = 0; i < excess; ++i) excess_taps[i] = i + 1;
        std::shuffle(excess_taps.begin(), excess_taps.end(), rng.engine());
        excess_taps.resize(q);
        std::sort(excess_taps.begin(), excess_taps.end());
        for (int e : excess_taps) {
            const cd g = numerics::complex_gaussian(rng, 1, 1.0)(0);
            const double abf_mag = rng.uniform(kAbfLow, 1.0);
            const cd abf = abf_mag * numerics::cis(rng.uniform(-kPi, kPi));
            ch.paths.push_back({los_delay + e, nu, (amp * w_nlos * g * abf) * steer});
        }
    }
    return ch;
}

/// h_eff[kappa, ell] for all antennas: sum over taps at delay ell of
/// g * exp(j 2 pi nu (kappa - ell) / (N (M + Mt))).
inline ComplexVector sample_cir(const ChannelRealization& ch, long kappa, int ell, const SystemConfig& cfg) {
    ComplexVector h = ComplexVector::Zero(std::max(ch.antennas(), 1));
    const double denom = cfg.doppler_phase_denominator();
    for (const auto& path : ch.paths) {
        if (path.delay != ell) continue;
        h += numerics::cis(2.0 * kPi * path.doppler * static_cast<double>(kappa - ell) / denom) * path.gain;
    }
    return h;
}

/// Superposed received frame of one antenna: r[kappa] = sum_k sum_l h_k[kappa,l] s_k[kappa-l].
inline ComplexVector propagate(const std::vector<ChannelRealization>& links,
                               const std::vector<const ComplexVector*>& tx, int antenna, const SystemConfig& cfg) {
    const Eigen::Index n = cfg.frame_len();
    ComplexVector r = ComplexVector::Zero(n);
    const double denom = cfg.doppler_phase_denominator();
    for (std::size_t u = 0; u < links.size(); ++u) {
        const ComplexVector& s = *tx[u];
        for (const auto& path : links[u].paths) {
            const cd g = path.gain(antenna);
            const double w = 2.0 * kPi * path.doppler / denom;
            for (Eigen::Index k = path.delay; k < n; ++k)
                r(k) += g * numerics::cis(w * static_cast<double>(k - path.delay)) * s(k - path.delay);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Link budget and noise
// ---------------------------------------------------------------------------

struct LinkBudgetCase {
    std::string name;
    double zenith_deg = 0.0;
    double bandwidth_hz = 122.88e6;
    double tx_power_dbm = 40.0;
    double tx_gain_db = 40.0;
    double g_over_t_dbk = -4.62;
    double fspl_db = 167.25;
    double atmospheric_db = 0.07;
    double shadowing_db = 3.0;
    double scintillation_db = 2.2;
    double polarization_db = 0.0;
    double additional_losses_db = 0.0;
    double margin_db = 6.0;
    double boltzmann_dbw = kBoltzmannDbw;

    void validate() const {
        for (double v : {atmospheric_db, shadowing_db, scintillation_db, polarization_db, additional_losses_db,
                         margin_db, fspl_db})
            if (v < 0.0) throw std::invalid_argument("LinkBudgetCase: loss terms must be >= 0");
        if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("LinkBudgetCase: bandwidth must be > 0");
    }
};

/// Single-terminal SNR [dB] of a link budget case.
inline double link_budget_snr(const LinkBudgetCase& c) {
    c.validate();
    const double p_dbw = c.tx_power_dbm - 30.0;
    return p_dbw + c.tx_gain_db + c.g_over_t_dbk - c.boltzmann_dbw - c.fspl_db - c.atmospheric_db -
           c.shadowing_db - c.scintillation_db - c.polarization_db - c.additional_losses_db - c.margin_db -
           10.0 * std::log10(c.bandwidth_hz);
}

/// The three published single-terminal cases (zenith 0, 25, 44.7 degrees).
inline std::vector<LinkBudgetCase> reference_link_budget_cases() {
    LinkBudgetCase c1;
    c1.name = "case1";
    LinkBudgetCase c2 = c1;
    c2.name = "case2";
    c2.zenith_deg = 25.0;
    c2.fspl_db = 168.10;
    LinkBudgetCase c3 = c1;
    c3.name = "case3";
    c3.zenith_deg = 44.7;
    c3.fspl_db = 170.21;
    return {c1, c2, c3};
}

/// Case for an arbitrary terminal: nadir FSPL scaled by slant range 1/cos(zenith).
inline LinkBudgetCase link_budget_for(double zenith_deg, double tx_power_dbm, double bandwidth_hz) {
    LinkBudgetCase c;
    c.name = "terminal";
    c.zenith_deg = zenith_deg;
    c.tx_power_dbm = tx_power_dbm;
    c.bandwidth_hz = bandwidth_hz;
    c.fspl_db = 167.25 - 20.0 * std::log10(std::cos(deg2rad(zenith_deg)));
    return c;
}

inline ComplexVector add_awgn(const ComplexVector& signal, double noise_variance, numerics::RngStream& rng) {
    if (noise_variance < 0.0) throw std::invalid_argument("add_awgn: variance must be >= 0");
    if (noise_variance == 0.0) return signal;
    return signal + numerics::complex_gaussian(rng, signal.size(), noise_variance);
}

}  // namespace tsotfs::channel
