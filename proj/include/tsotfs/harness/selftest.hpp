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
#include "tsotfs/modem.hpp"
#include "tsotfs/numerics.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace tsotfs::harness {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

struct SelfCheck {
    std::string name;
    std::function<CheckResult()> run;
};

namespace detail {

inline CheckResult within(double value, double target, double tol) {
    return {std::abs(value - target) <= tol, "value " + std::to_string(value) + ", expected " + std::to_string(target) +
                                                 " +/- " + std::to_string(tol)};
}

inline CheckResult below(double value, double limit) {
    return {value < limit, "value " + std::to_string(value) + ", limit " + std::to_string(limit)};
}

}  // namespace detail

/// Closed-form and oracle checks that run in a few seconds.
inline std::vector<SelfCheck> selftest_checks() {
    using namespace tsotfs::numerics;
    std::vector<SelfCheck> c;

    c.push_back({"numerics.dft_unitary_8", [] {
                     const auto f = unitary_dft(8);
                     return detail::below((f * f.adjoint() - ComplexMatrix::Identity(8, 8)).norm(), 1e-12);
                 }});
    c.push_back({"numerics.pinv_column", [] {
                     ComplexMatrix a(2, 1);
                     a << 1.0, 1.0;
                     const auto p = pinv(a);
                     return detail::below(std::abs(p(0, 0) - 0.5) + std::abs(p(0, 1) - 0.5), 1e-14);
                 }});
    c.push_back({"numerics.evd_rank1", [] {
                     ComplexVector v(2);
                     v << cd(0.6, 0.0), cd(0.0, 0.8);
                     const auto e = herm_evd(v * v.adjoint());
                     return detail::below(std::abs(e.eigenvalues(0)) + std::abs(e.eigenvalues(1) - 1.0), 1e-12);
                 }});
    c.push_back({"numerics.lsqr_identity", [] {
                     RngStream rng(1, 1);
                     const ComplexVector b = complex_gaussian(rng, 4, 1.0);
                     const auto r = lsqr_solve(LinearOperator::from_matrix(ComplexMatrix::Identity(4, 4)), b);
                     return detail::below((r.x - b).norm(), 1e-12);
                 }});
    c.push_back({"numerics.lsqr_vs_pinv", [] {
                     RngStream rng(2, 1);
                     ComplexMatrix a(20, 12);
                     for (Eigen::Index j = 0; j < 12; ++j) a.col(j) = complex_gaussian(rng, 20, 1.0);
                     const ComplexVector b = complex_gaussian(rng, 20, 1.0);
                     const ComplexVector xd = pinv(a) * b;
                     const auto r = lsqr_solve(LinearOperator::from_matrix(a), b, 1e-8, 200);
                     return detail::below((r.x - xd).norm() / xd.norm(), 1e-6);
                 }});
    c.push_back({"channel.steering_broadside", [] {
                     const auto v = channel::steering_vector(0.0, 123.0, 2, 2);
                     return detail::below((v - ComplexVector::Constant(4, 0.5)).norm(), 1e-15);
                 }});
    c.push_back({"channel.doppler_zenith_zero", [] {
                     const auto g = channel::OrbitGeometry::from_config(desk_profile());
                     return detail::below(std::abs(channel::doppler_at(kPi / 2.0, g)), 1e-9);
                 }});
    c.push_back({"channel.doppler_coverage_edge", [] {
                     const auto g = channel::OrbitGeometry::from_config(desk_profile());
                     const double e = channel::elevation_from_nadir(channel::deg2rad(44.7), g);
                     return detail::within(channel::doppler_at(e, g), 178.2e3, 0.02 * 178.2e3);
                 }});
    c.push_back({"channel.link_budget_kb_only", [] {
                     channel::LinkBudgetCase z;
                     z.tx_power_dbm = 30.0;
                     z.tx_gain_db = z.g_over_t_dbk = z.fspl_db = z.atmospheric_db = z.shadowing_db = 0.0;
                     z.scintillation_db = z.polarization_db = z.additional_losses_db = z.margin_db = 0.0;
                     z.bandwidth_hz = 1.0;
                     return detail::within(channel::link_budget_snr(z), 228.6, 1e-12);
                 }});
    const double table[3] = {14.59, 13.73, 11.62};
    const auto cases = channel::reference_link_budget_cases();
    for (int i = 0; i < 3; ++i)
        c.push_back({"channel.link_budget_" + cases[i].name,
                     [=] { return detail::within(channel::link_budget_snr(cases[i]), table[i], 0.1); }});
    c.push_back({"channel.cir_quarter_turn", [] {
                     SystemConfig cfg = desk_profile();
                     channel::ChannelRealization ch;
                     ch.paths.push_back({2, 1.0, ComplexVector::Ones(1)});
                     const long q = static_cast<long>(cfg.doppler_phase_denominator() / 4.0);
                     const cd a = channel::sample_cir(ch, 2, 2, cfg)(0);
                     const cd b = channel::sample_cir(ch, 2 + q, 2, cfg)(0);
                     return detail::below(std::abs(b / a - cd(0.0, 1.0)), 1e-12);
                 }});
    c.push_back({"modem.qpsk_00", [] {
                     const auto s = modem::qam_map({0, 0}, 2);
                     return detail::below(std::abs(s(0) - cd(1.0, 1.0) / std::sqrt(2.0)), 1e-15);
                 }});
    for (int mb : {1, 2, 4, 6, 8}) {
        c.push_back({"modem.constellation_energy_" + std::to_string(mb), [mb] {
                         const auto p = modem::qam_constellation(mb);
                         return detail::within(p.squaredNorm() / static_cast<double>(p.size()), 1.0, 1e-12);
                     }});
    }
    c.push_back({"modem.frame_length_52", [] {
                     SystemConfig cfg;
                     cfg.M = 256;
                     cfg.Mt = 52;
                     return detail::within(cfg.frame_len(), 2516, 0);
                 }});
    c.push_back({"modem.frame_length_62", [] {
                     SystemConfig cfg;
                     cfg.M = 256;
                     cfg.Mt = 62;
                     return detail::within(cfg.frame_len(), 2606, 0);
                 }});
    const int mts[4] = {52, 62, 72, 82};
    const double eff[4] = {0.7454, 0.6948, 0.6492, 0.6079};
    for (int i = 0; i < 4; ++i)
        c.push_back({"modem.efficiency_Mt" + std::to_string(mts[i]),
                     [=] { return detail::within(std::round(modem::transmission_efficiency(256, 8, 33, mts[i]) * 1e4) / 1e4, eff[i], 1e-12); }});
    c.push_back({"modem.round_trip", [] {
                     SystemConfig cfg = desk_profile();
                     RngStream rng(3, 3);
                     ComplexMatrix x(cfg.M, cfg.N);
                     for (Eigen::Index j = 0; j < cfg.N; ++j) x.col(j) = complex_gaussian(rng, cfg.M, 1.0);
                     const auto f = modem::modulate(x, modem::make_training_sequence(3, 0, cfg.Mt));
                     const auto back = modem::demodulate(modem::strip_training(f.samples, cfg), cfg.M, cfg.N);
                     return detail::below((back - x).cwiseAbs().maxCoeff(), 1e-10);
                 }});
    c.push_back({"access.somp_zero_measurement", [] {
                     SystemConfig cfg = desk_profile();
                     const auto ts = modem::make_training_set(5, cfg);
                     const auto dict = access::build_sensing(ts, cfg.L, cfg.G());
                     access::MmvMeasurement m;
                     m.antennas = cfg.antennas();
                     m.slots = cfg.N + 1;
                     m.r_ts = ComplexMatrix::Zero(cfg.G(), m.antennas * m.slots);
                     const auto r = access::somp(m, dict, 30, 1e-3);
                     return CheckResult{r.support.empty(), "support size " + std::to_string(r.support.size())};
                 }});
    c.push_back({"access.esprit_137", [] {
                     RngStream rng(6, 6);
                     const int n = 8;
                     ComplexMatrix h(n + 1, 16);
                     const ComplexVector g = complex_gaussian(rng, 16, 1.0);
                     for (int i = 0; i <= n; ++i) h.row(i) = cis(2.0 * kPi * 1.37 * i / n) * g.transpose();
                     return detail::within(access::esprit_doppler(h, n).nu, 1.37, 1e-6);
                 }});
    c.push_back({"detector.identity_channel", [] {
                     SystemConfig cfg = desk_profile();
                     channel::ChannelRealization ch;
                     ch.paths.push_back({0, 0.0, ComplexVector::Ones(cfg.antennas())});
                     const detector::BandedChannelOperator op(ch, 3, cfg);
                     RngStream rng(7, 7);
                     const ComplexVector x = complex_gaussian(rng, cfg.frame_len(), 1.0);
                     return detail::below((op.apply(x) - x).norm(), 1e-14);
                 }});
    c.push_back({"metrics.ber_7_errors", [] {
                     BerCounts b;
                     b.true_active = 1;
                     b.bits_per_terminal = 64 * 8 * 2;
                     b.bit_errors = 7;
                     return detail::within(b.ber(), 7.0 / 1024.0, 1e-15);
                 }});
    c.push_back({"metrics.pe_one_miss", [] {
                     std::vector<bool> t(100, false), e(100, false);
                     t[4] = true;
                     return detail::within(trial_pe(t, e), 0.01, 1e-15);
                 }});
    return c;
}

/// Prints one PASS/FAIL line per check; returns the number of failures.
inline int run_selftest(std::ostream& os) {
    int failures = 0;
    for (const auto& chk : selftest_checks()) {
        CheckResult r;
        try {
            r = chk.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        failures += !r.pass;
        os << (r.pass ? "PASS " : "FAIL ") << chk.name << ": " << r.detail << '\n';
    }
    os << (failures == 0 ? "selftest: all checks passed" : "selftest: " + std::to_string(failures) + " check(s) failed")
       << '\n';
    return failures;
}

}  // namespace tsotfs::harness
