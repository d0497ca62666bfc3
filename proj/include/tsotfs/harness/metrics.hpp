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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace tsotfs::harness {

inline constexpr double kNmseFloorDb = -120.0;

/// Summed squared CIR error and summed truth energy of one trial.
struct ErrorRatio {
    double num = 0.0;
    double den = 0.0;
    bool valid() const { return den > 0.0; }
    double ratio() const { return num / den; }
};

using CirFunction = std::function<ComplexVector(int terminal, long kappa, int ell)>;

namespace detail {

inline void add_taps(std::map<int, std::set<int>>& taps, const std::vector<channel::ChannelRealization>& links) {
    for (const auto& ch : links)
        for (const auto& p : ch.paths) taps[ch.terminal].insert(p.delay);
}

/// Per-antenna CIR of one link at every kappa in [ell, F) for tap ell.
inline ComplexMatrix tap_trajectory(const channel::ChannelRealization* ch, int ell, int antennas,
                                    const SystemConfig& cfg) {
    const long f = cfg.frame_len();
    ComplexMatrix h = ComplexMatrix::Zero(f - ell, antennas);
    if (!ch) return h;
    const double w = 2.0 * kPi / cfg.doppler_phase_denominator();
    for (const auto& p : ch->paths) {
        if (p.delay != ell) continue;
        for (long k = ell; k < f; ++k) h.row(k - ell) += numerics::cis(w * p.doppler * (k - ell)) * p.gain.transpose();
    }
    return h;
}

inline const channel::ChannelRealization* find_link(const std::vector<channel::ChannelRealization>& links, int k) {
    for (const auto& ch : links)
        if (ch.terminal == k) return &ch;
    return nullptr;
}

}  // namespace detail

/// Error of estimated links against truth over every kappa >= ell, every
/// antenna and the union of true and estimated (terminal, tap) pairs.
/// Links absent from a list count as zero channels.
inline ErrorRatio cir_error(const std::vector<channel::ChannelRealization>& truth,
                            const std::vector<channel::ChannelRealization>& est, const SystemConfig& cfg) {
    std::map<int, std::set<int>> taps;
    detail::add_taps(taps, truth);
    detail::add_taps(taps, est);
    ErrorRatio r;
    const int pa = cfg.antennas();
    for (const auto& [k, set] : taps) {
        const auto* t = detail::find_link(truth, k);
        const auto* e = detail::find_link(est, k);
        for (int ell : set) {
            const ComplexMatrix ht = detail::tap_trajectory(t, ell, pa, cfg);
            const ComplexMatrix he = detail::tap_trajectory(e, ell, pa, cfg);
            r.num += (he - ht).squaredNorm();
            r.den += ht.squaredNorm();
        }
    }
    return r;
}

/// Same accounting with an arbitrary estimated CIR (`est_taps` lists its support).
inline ErrorRatio cir_error(const std::vector<channel::ChannelRealization>& truth,
                            const std::map<int, std::set<int>>& est_taps, const CirFunction& est,
                            const SystemConfig& cfg) {
    std::map<int, std::set<int>> taps = est_taps;
    detail::add_taps(taps, truth);
    ErrorRatio r;
    const int pa = cfg.antennas();
    const long f = cfg.frame_len();
    for (const auto& [k, set] : taps) {
        const auto* t = detail::find_link(truth, k);
        const bool has_est = est_taps.count(k) > 0;
        for (int ell : set) {
            const ComplexMatrix ht = detail::tap_trajectory(t, ell, pa, cfg);
            r.den += ht.squaredNorm();
            if (!has_est || !est_taps.at(k).count(ell)) {
                r.num += ht.squaredNorm();
                continue;
            }
            for (long kappa = ell; kappa < f; ++kappa)
                r.num += (est(k, kappa, ell).transpose() - ht.row(kappa - ell)).squaredNorm();
        }
    }
    return r;
}

/// Per-trial identification errors normalised by K.
inline double trial_pe(const std::vector<bool>& truth, const std::vector<bool>& est) {
    if (truth.size() != est.size() || truth.empty()) throw std::invalid_argument("trial_pe: activity vectors must match");
    int errors = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) errors += truth[k] != est[k];
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

/// Bit-error bookkeeping of one trial.
struct BerCounts {
    int true_active = 0;       // K_a
    int false_terminals = 0;   // E_a: missed plus false alarms
    long bit_errors = 0;       // B_a over A intersect A_hat
    long bits_per_terminal = 0;

    /// (E_a N M M_b + B_a)/(K_a N M M_b), capped at 1; K_a = 0 gives 0 or 1.
    double ber() const {
        if (true_active == 0) return false_terminals > 0 ? 1.0 : 0.0;
        const double denom = static_cast<double>(true_active) * bits_per_terminal;
        return std::min(1.0, (static_cast<double>(false_terminals) * bits_per_terminal + bit_errors) / denom);
    }
};

struct TrialMetrics {
    double pe = 0.0;
    ErrorRatio nmse;
    ErrorRatio oracle_nmse;
    ErrorRatio coarse_nmse;
    BerCounts ber;
};

inline double metric_pe(const std::vector<TrialMetrics>& records) {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += r.pe;
    return s / static_cast<double>(records.size());
}

/// Mean of per-trial linear ratios in dB; trials with zero truth energy are skipped.
inline double metric_nmse_db(const std::vector<TrialMetrics>& records,
                             ErrorRatio TrialMetrics::*which = &TrialMetrics::nmse) {
    double s = 0.0;
    int n = 0;
    for (const auto& r : records) {
        const ErrorRatio& e = r.*which;
        if (!e.valid()) continue;
        s += e.ratio();
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    const double mean = s / n;
    if (mean <= 0.0) return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(mean));
}

inline double metric_ber(const std::vector<TrialMetrics>& records) {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += r.ber.ber();
    return s / static_cast<double>(records.size());
}

/// 1.96 sigma / sqrt(n) of a per-trial sample.
inline double half_width(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return 1.96 * std::sqrt(v / static_cast<double>(xs.size()));
}

}  // namespace tsotfs::harness
