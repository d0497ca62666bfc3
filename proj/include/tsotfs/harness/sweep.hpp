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
#include "tsotfs/harness/metrics.hpp"
#include "tsotfs/harness/trial.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tsotfs::harness {

enum class SweepAxis { G, TxPower, Ka, Nlos };

inline SweepAxis axis_from_string(const std::string& s) {
    if (s == "G") return SweepAxis::G;
    if (s == "tx_power_dbm") return SweepAxis::TxPower;
    if (s == "Ka") return SweepAxis::Ka;
    if (s == "nlos_paths") return SweepAxis::Nlos;
    throw std::invalid_argument("unknown sweep axis '" + s + "' (expected G, tx_power_dbm, Ka or nlos_paths)");
}

inline std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::G: return "G";
        case SweepAxis::TxPower: return "tx_power_dbm";
        case SweepAxis::Ka: return "Ka";
        case SweepAxis::Nlos: return "nlos_paths";
    }
    return "?";
}

/// System at one axis point. G moves Mt = L - 1 + G.
inline SystemConfig apply_axis(SystemConfig cfg, SweepAxis axis, double value) {
    auto as_int = [&](const char* what) {
        if (value != std::floor(value)) throw std::invalid_argument(std::string(what) + " axis values must be integers");
        return static_cast<int>(value);
    };
    switch (axis) {
        case SweepAxis::G: cfg.Mt = cfg.L - 1 + as_int("G"); break;
        case SweepAxis::TxPower: cfg.tx_power_dbm = value; break;
        case SweepAxis::Ka: cfg.Ka = as_int("Ka"); break;
        case SweepAxis::Nlos:
            cfg.nlos_paths = as_int("nlos_paths");
            cfg.nlos_excess_taps = std::clamp(cfg.nlos_excess_taps, cfg.nlos_paths, cfg.L - 1);
            break;
    }
    return cfg;
}

struct ExperimentConfig {
    SystemConfig system;
    TrialOptions trial;
    SweepAxis axis = SweepAxis::G;
    std::vector<double> values{static_cast<double>(SystemConfig{}.G())};
    int trials = 10;
    std::uint64_t seed = 1;
    int workers = 1;
    bool timing = false;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
        if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
        if (values.empty()) throw std::invalid_argument("experiment: axis values must not be empty");
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i] > values[i - 1])) throw std::invalid_argument("experiment: axis values must be strictly increasing");
        for (double v : values) apply_axis(system, axis, v).validate();
    }
};

struct SweepRow {
    double axis_value = 0.0;
    int trials = 0;
    double pe = 0.0;
    double nmse_db = 0.0;
    double ber = 0.0;
    double oracle_nmse_db = 0.0;
    double mean_somp_iters = 0.0;
    double mean_lsqr_iters = 0.0;
    double wall_ms = 0.0;
    // manifest-only extras
    double pe_half_width = 0.0;
    double ber_half_width = 0.0;
    double nmse_half_width = 0.0;  // linear
    int regularized_trials = 0;
    int somp_max_iter_trials = 0;
};

/// Runs trials [0, n) on `workers` threads; record i lands in slot i.
template <class Fn>
std::vector<TrialRecord> run_trials_parallel(int n, int workers, Fn&& fn) {
    std::vector<TrialRecord> out(n);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    const int w = std::max(1, std::min(workers, n));
    if (w == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < w; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline SweepRow summarize(double axis_value, const std::vector<TrialRecord>& recs) {
    SweepRow row;
    row.axis_value = axis_value;
    row.trials = static_cast<int>(recs.size());
    std::vector<TrialMetrics> ms;
    std::vector<double> pes, bers, nm;
    for (const auto& r : recs) {
        ms.push_back(r.metrics);
        pes.push_back(r.metrics.pe);
        bers.push_back(r.metrics.ber.ber());
        if (r.metrics.nmse.valid()) nm.push_back(r.metrics.nmse.ratio());
        row.mean_somp_iters += r.somp_iterations;
        row.mean_lsqr_iters += r.lsqr_iterations;
        row.wall_ms += r.wall_ms;
        row.regularized_trials += r.regularized;
        row.somp_max_iter_trials += r.somp_hit_max;
    }
    row.pe = metric_pe(ms);
    row.ber = metric_ber(ms);
    row.nmse_db = metric_nmse_db(ms, &TrialMetrics::nmse);
    row.oracle_nmse_db = metric_nmse_db(ms, &TrialMetrics::oracle_nmse);
    row.mean_somp_iters /= std::max(1, row.trials);
    row.mean_lsqr_iters /= std::max(1, row.trials);
    row.pe_half_width = half_width(pes);
    row.ber_half_width = half_width(bers);
    row.nmse_half_width = half_width(nm);
    return row;
}

/// Trial seeds depend on (seed, trial index) only, so every axis point and
/// the oracle see the same scenarios and noise.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& exp) {
    exp.validate();
    std::vector<SweepRow> rows;
    for (double v : exp.values) {
        const TrialContext ctx = TrialContext::make(apply_axis(exp.system, exp.axis, v), exp.seed);
        const auto recs = run_trials_parallel(exp.trials, exp.workers,
                                              [&](int i) { return run_trial(ctx, exp.trial, static_cast<std::uint64_t>(i)); });
        rows.push_back(summarize(v, recs));
    }
    return rows;
}

inline constexpr const char* kCsvHeader =
    "axis_value,trials,pe,nmse_db,ber,oracle_nmse_db,mean_somp_iters,mean_lsqr_iters,wall_ms";

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// wall_ms is written as 0 unless `timing` is set, keeping the CSV reproducible.
inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, bool timing = false) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << format_number(r.axis_value) << ',' << r.trials << ',' << format_number(r.pe) << ','
           << format_number(r.nmse_db) << ',' << format_number(r.ber) << ',' << format_number(r.oracle_nmse_db) << ','
           << format_number(r.mean_somp_iters) << ',' << format_number(r.mean_lsqr_iters) << ','
           << format_number(timing ? r.wall_ms : 0.0) << '\n';
    }
}

}  // namespace tsotfs::harness
