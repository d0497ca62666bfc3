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

#include "tsotfs/access.hpp"
#include "tsotfs/channel.hpp"
#include "tsotfs/config.hpp"
#include "tsotfs/detector.hpp"
#include "tsotfs/harness/metrics.hpp"
#include "tsotfs/harness/scenario.hpp"
#include "tsotfs/modem.hpp"
#include "tsotfs/numerics.hpp"

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsotfs::harness {

enum class NoiseMode { LinkBudget, Snr, Variance };

inline NoiseMode noise_mode_from_string(const std::string& s) {
    if (s == "linkbudget") return NoiseMode::LinkBudget;
    if (s == "snr") return NoiseMode::Snr;
    if (s == "variance") return NoiseMode::Variance;
    throw std::invalid_argument("unknown noise mode '" + s + "' (expected linkbudget, snr or variance)");
}

inline std::string to_string(NoiseMode m) {
    switch (m) {
        case NoiseMode::LinkBudget: return "linkbudget";
        case NoiseMode::Snr: return "snr";
        case NoiseMode::Variance: return "variance";
    }
    return "?";
}

struct TrialOptions {
    NoiseMode noise = NoiseMode::LinkBudget;
    double snr_db = 15.0;          // NoiseMode::Snr, per antenna and sample
    double noise_variance = 0.0;   // NoiseMode::Variance
    bool zero_doppler = false;
    bool genie_csi = false;        // detect with true links and true activity
    bool detect = true;
    bool oracle = true;
    bool coarse = false;           // also score the Doppler-ignored stage-1 CIR
};

/// Per-sweep-point state shared read-only by every trial.
struct TrialContext {
    SystemConfig cfg;
    std::uint64_t seed = 0;
    std::vector<modem::TrainingSequence> ts;
    access::SensingMatrix dict;

    static TrialContext make(const SystemConfig& cfg, std::uint64_t seed) {
        cfg.validate();
        TrialContext c;
        c.cfg = cfg;
        c.seed = seed;
        c.ts = modem::make_training_set(seed, cfg);
        c.dict = access::build_sensing(c.ts, cfg.L, cfg.G());
        return c;
    }
};

struct TrialRecord {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    double noise_variance = 0.0;
    std::vector<bool> alpha;
    std::vector<bool> alpha_hat;
    std::vector<channel::ChannelRealization> truth;
    std::vector<channel::ChannelRealization> estimate;
    std::vector<int> true_support;
    std::vector<int> support;
    std::map<int, modem::Bits> tx_bits;
    std::map<int, modem::Bits> rx_bits;
    TrialMetrics metrics;
    int somp_iterations = 0;
    bool somp_hit_max = false;
    double lsqr_iterations = 0.0;  // mean per symbol solve
    bool lsqr_converged = true;
    bool regularized = false;
    double wall_ms = 0.0;
};

enum class StreamPurpose : std::uint64_t { Scenario = 0, Bits = 1, Noise = 2 };

inline numerics::RngStream trial_stream(std::uint64_t seed, std::uint64_t trial, StreamPurpose p) {
    return numerics::RngStream(seed, (trial << 2) | static_cast<std::uint64_t>(p));
}

/// Receiver noise variance. Link-budget mode sizes it for the weakest active
/// terminal. SNR mode fixes the per-antenna per-sample SNR of a unit-power
/// link (40 dBm at zenith), so weaker terminals see the pathloss on top.
inline double noise_variance_for(const Scenario& s, const TrialOptions& o, const SystemConfig& cfg) {
    if (o.noise == NoiseMode::Variance) {
        if (o.noise_variance < 0.0) throw std::invalid_argument("noise variance must be >= 0");
        return o.noise_variance;
    }
    double worst_sigma = -1.0;
    double worst_snr = std::numeric_limits<double>::infinity();
    auto consider = [&](const channel::TerminalConfig& t) {
        const double ps = channel::received_power_scale(t, cfg);
        const double snr_db = o.noise == NoiseMode::Snr
                                  ? o.snr_db + numerics::db10(ps)
                                  : channel::link_budget_snr(channel::link_budget_for(t.zenith_deg, t.tx_power_dbm,
                                                                                       cfg.bandwidth_hz()));
        if (snr_db < worst_snr) {
            worst_snr = snr_db;
            worst_sigma = ps / cfg.antennas() / numerics::from_db10(snr_db);
        }
    };
    for (int k : s.active) consider(s.terminals[k]);
    if (s.active.empty()) {
        channel::TerminalConfig ref;
        ref.tx_power_dbm = cfg.tx_power_dbm;
        consider(ref);
    }
    return worst_sigma;
}

/// Support indices k*L + l of the true links, ascending.
inline std::vector<int> true_support_of(const std::vector<channel::ChannelRealization>& links, int L) {
    std::vector<int> s;
    for (const auto& ch : links)
        for (const auto& p : ch.paths) s.push_back(ch.terminal * L + p.delay);
    std::sort(s.begin(), s.end());
    return s;
}

/// One Monte-Carlo trial, a pure function of (context, options, trial index).
inline TrialRecord run_trial(const TrialContext& ctx, const TrialOptions& opt, std::uint64_t trial,
                             std::ostream* somp_dump = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemConfig& cfg = ctx.cfg;
    TrialRecord rec;
    rec.seed = ctx.seed;
    rec.trial = trial;

    auto scen_rng = trial_stream(ctx.seed, trial, StreamPurpose::Scenario);
    auto bit_rng = trial_stream(ctx.seed, trial, StreamPurpose::Bits);
    auto noise_rng = trial_stream(ctx.seed, trial, StreamPurpose::Noise);

    const Scenario scen = generate_scenario(cfg, scen_rng, opt.zero_doppler);
    rec.alpha = scen.activity();
    rec.truth = scen.links;
    rec.true_support = true_support_of(scen.links, cfg.L);

    std::vector<ComplexVector> tx;
    tx.reserve(scen.active.size());
    for (int k : scen.active) {
        modem::Bits bits(static_cast<std::size_t>(cfg.bits_per_terminal()));
        for (auto& b : bits) b = static_cast<std::uint8_t>(bit_rng.uniform_int(0, 1));
        tx.push_back(modem::modulate(modem::bits_to_grid(bits, cfg), ctx.ts[k]).samples);
        rec.tx_bits[k] = std::move(bits);
    }
    std::vector<const ComplexVector*> tx_ptr;
    for (const auto& s : tx) tx_ptr.push_back(&s);

    rec.noise_variance = noise_variance_for(scen, opt, cfg);
    std::vector<ComplexVector> rx;
    rx.reserve(cfg.antennas());
    for (int p = 0; p < cfg.antennas(); ++p)
        rx.push_back(channel::add_awgn(channel::propagate(scen.links, tx_ptr, p, cfg), rec.noise_variance, noise_rng));

    const auto meas = access::build_measurement(rx, cfg);
    const auto acc = access::run_access(meas, ctx.dict, rec.noise_variance, cfg);
    if (somp_dump) access::write_somp_dump(*somp_dump, acc.somp, ctx.dict);
    rec.support = acc.coarse.support;
    rec.alpha_hat = acc.coarse.active;
    rec.estimate = access::reconstruct_cir(acc.refined);
    rec.somp_iterations = static_cast<int>(acc.somp.trace.size());
    rec.somp_hit_max = acc.somp.hit_max_iter;
    rec.regularized = acc.refined.regularized;

    rec.metrics.pe = trial_pe(rec.alpha, rec.alpha_hat);
    rec.metrics.nmse = cir_error(rec.truth, rec.estimate, cfg);
    if (opt.oracle) {
        const auto oc = access::oracle_ls(meas, rec.true_support, rec.alpha, ctx.dict);
        rec.metrics.oracle_nmse = cir_error(rec.truth, access::reconstruct_cir(access::refine(meas, ctx.dict, oc, cfg)), cfg);
    }
    if (opt.coarse) {
        std::map<int, std::set<int>> taps;
        for (int k : acc.coarse.ats)
            for (int l : access::estimate_delays(acc.coarse, k, cfg.L)) taps[k].insert(l);
        const CirFunction f = [&](int k, long kappa, int ell) {
            return access::coarse_cir(acc.coarse, meas, k, kappa, ell, ctx.dict, cfg);
        };
        rec.metrics.coarse_nmse = cir_error(rec.truth, taps, f, cfg);
    }

    auto& ber = rec.metrics.ber;
    ber.true_active = static_cast<int>(scen.active.size());
    ber.bits_per_terminal = cfg.bits_per_terminal();
    for (int k = 0; k < cfg.K; ++k) ber.false_terminals += rec.alpha[k] != rec.alpha_hat[k];

    if (opt.detect) {
        const auto& links = opt.genie_csi ? rec.truth : rec.estimate;
        const bool fits = static_cast<int>(links.size()) <= cfg.antennas();
        if (opt.genie_csi) ber.false_terminals = 0;
        if (fits && !links.empty()) {
            const auto det = detector::detect_frame(rx, links, ctx.ts, cfg);
            rec.lsqr_iterations = static_cast<double>(det.front().iterations) / cfg.N;
            for (const auto& d : det) {
                rec.lsqr_converged = rec.lsqr_converged && d.converged;
                rec.rx_bits[d.terminal] = d.bits;
            }
        }
        for (const auto& [k, bits] : rec.tx_bits) {
            const auto it = rec.rx_bits.find(k);
            if (it == rec.rx_bits.end()) {
                if (opt.genie_csi || rec.alpha_hat[k]) ber.bit_errors += static_cast<long>(bits.size());
                continue;
            }
            for (std::size_t b = 0; b < bits.size(); ++b) ber.bit_errors += bits[b] != it->second[b];
        }
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace tsotfs::harness
