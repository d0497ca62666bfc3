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

#include "tsotfs/channel.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace tsotfs;
using namespace tsotfs::channel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("steering vector closed forms", "[channel][steering]") {
    const auto broadside = steering_vector(0.0, 77.0, 2, 2);
    REQUIRE((broadside - ComplexVector::Constant(4, 0.5)).norm() < 1e-15);

    const auto single = steering_vector(31.0, 12.0, 1, 1);
    REQUIRE(single.size() == 1);
    REQUIRE(std::abs(single(0) - cd(1.0, 0.0)) < 1e-15);
}

TEST_CASE("steering vector matches the per-element phase formula", "[channel][steering]") {
    const double z = deg2rad(30.0), a = deg2rad(45.0);
    const auto v = steering_vector(30.0, 45.0, 4, 4);
    REQUIRE(v.size() == 16);
    REQUIRE_THAT(v.norm(), WithinAbs(1.0, 1e-14));
    for (int p1 = 0; p1 < 4; ++p1)
        for (int p2 = 0; p2 < 4; ++p2) {
            const double ph = -kPi * std::sin(z) * (std::cos(a) * p1 + std::sin(a) * p2);
            const cd expect = std::exp(cd(0.0, ph)) / 4.0;
            REQUIRE(std::abs(v(p1 * 4 + p2) - expect) < 1e-14);
        }
}

TEST_CASE("Doppler vanishes at zenith and peaks near 178.2 kHz at the coverage edge", "[channel][geometry]") {
    const auto g = OrbitGeometry::from_config(SystemConfig{});
    REQUIRE_THAT(doppler_at(kPi / 2.0, g), WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(doppler_vector_form(0.0, g), WithinAbs(0.0, 1e-9));
    const double edge = elevation_from_nadir(deg2rad(44.7), g);
    REQUIRE_THAT(doppler_at(edge, g), WithinRel(178.2e3, 0.02));
}

TEST_CASE("closed-form and vector-form Doppler agree over the coverage region", "[channel][geometry]") {
    const auto g = OrbitGeometry::from_config(SystemConfig{});
    const double edge = elevation_from_nadir(deg2rad(44.7), g);
    int checked = 0;
    for (double t = 1.0; t < 400.0; t += 3.0) {
        const double el = elevation_at(t, g);
        if (el < edge) break;
        const double closed = doppler_at(el, g);
        REQUIRE_THAT(std::abs(doppler_vector_form(t, g)), WithinRel(closed, 0.005));
        ++checked;
    }
    REQUIRE(checked > 10);
}

TEST_CASE("frame-scale Doppler and delay jitter", "[channel][geometry]") {
    const auto g = OrbitGeometry::from_config(SystemConfig{});
    const double frame = 25e-6;
    // finite difference of the vector-form trajectory at the maximum Doppler rate
    const double dfd = std::abs(doppler_vector_form(frame, g) - doppler_vector_form(0.0, g));
    REQUIRE_THAT(dfd, WithinRel(0.09, 0.3));
    REQUIRE_THAT(relative_delay_at(0.0, g), WithinAbs(0.0, 1e-18));
    const double dtau = std::abs(relative_delay_at(150.0 + frame, g) - relative_delay_at(150.0, g));
    REQUIRE_THAT(dtau, WithinRel(0.55e-9, 0.3));
}

TEST_CASE("link budget reproduces the three reference cases", "[channel][linkbudget]") {
    const auto cases = reference_link_budget_cases();
    REQUIRE(cases.size() == 3);
    REQUIRE_THAT(link_budget_snr(cases[0]), WithinAbs(14.59, 0.1));
    REQUIRE_THAT(link_budget_snr(cases[1]), WithinAbs(13.73, 0.1));
    REQUIRE_THAT(link_budget_snr(cases[2]), WithinAbs(11.62, 0.1));
}

TEST_CASE("link budget reduces to -k - 10log10(B) with every other term zero", "[channel][linkbudget]") {
    LinkBudgetCase z;
    z.tx_power_dbm = 30.0;
    z.tx_gain_db = z.g_over_t_dbk = z.fspl_db = z.atmospheric_db = z.shadowing_db = 0.0;
    z.scintillation_db = z.polarization_db = z.additional_losses_db = z.margin_db = 0.0;
    z.bandwidth_hz = 1.0;
    REQUIRE_THAT(link_budget_snr(z), WithinAbs(228.6, 1e-12));
    z.bandwidth_hz = 1e6;
    REQUIRE_THAT(link_budget_snr(z), WithinAbs(228.6 - 60.0, 1e-12));
    z.atmospheric_db = -1.0;
    REQUIRE_THROWS_AS(z.validate(), std::invalid_argument);
}

TEST_CASE("per-terminal link budget grows the path loss with zenith", "[channel][linkbudget]") {
    const auto nadir = link_budget_for(0.0, 40.0, 122.88e6);
    REQUIRE_THAT(nadir.fspl_db, WithinAbs(167.25, 1e-12));
    const auto edge = link_budget_for(44.7, 40.0, 122.88e6);
    REQUIRE(edge.fspl_db > nadir.fspl_db);
    REQUIRE(link_budget_snr(edge) < link_budget_snr(nadir));
}

TEST_CASE("sampled CIR follows the Doppler phase ramp", "[channel][cir]") {
    const SystemConfig cfg;
    ChannelRealization ch;
    ch.paths.push_back({2, 1.0, ComplexVector::Ones(1)});
    // a quarter of N(M+Mt) samples later the phase advanced by pi/2
    const long q = static_cast<long>(cfg.doppler_phase_denominator() / 4.0);
    const cd a = sample_cir(ch, 2, 2, cfg)(0);
    const cd b = sample_cir(ch, 2 + q, 2, cfg)(0);
    REQUIRE(std::abs(b / a - cd(0.0, 1.0)) < 1e-12);
    REQUIRE(sample_cir(ch, 10, 3, cfg).norm() == 0.0);
}

TEST_CASE("generated links respect delays, Doppler bound and Rician weights", "[channel][tsl]") {
    SystemConfig cfg;
    cfg.nlos_paths = 2;
    numerics::RngStream rng(3, 7);
    double los_power = 0.0, nlos_power = 0.0;
    const int draws = 3000;
    for (int d = 0; d < draws; ++d) {
        TerminalConfig t;
        t.id = d % cfg.K;
        t.zenith_deg = rng.uniform(0.0, cfg.max_zenith_deg);
        t.azimuth_deg = rng.uniform(0.0, 360.0);
        t.nlos_count = cfg.nlos_paths;
        t.rician_factor_db = cfg.rician_factor_db;
        t.speed_mps = cfg.max_terminal_speed_mps;
        t.tx_power_dbm = cfg.tx_power_dbm;
        const auto ch = generate_tsl(t, cfg, rng);
        REQUIRE(ch.paths.size() == 3);
        std::set<int> delays;
        const double nu = ch.paths.front().doppler;
        REQUIRE(std::abs(nu) < cfg.N / 2.0);
        for (const auto& p : ch.paths) {
            REQUIRE(p.delay >= 0);
            REQUIRE(p.delay <= cfg.L - 1);
            REQUIRE(p.doppler == nu);
            delays.insert(p.delay);
        }
        REQUIRE(delays.size() == 3);
        const double ps = received_power_scale(t, cfg);
        los_power += ch.paths[0].gain.squaredNorm() / ps;
        nlos_power += (ch.paths[1].gain.squaredNorm() + ch.paths[2].gain.squaredNorm()) / ps;
    }
    const double gamma = numerics::from_db10(cfg.rician_factor_db);
    REQUIRE_THAT(los_power / draws, WithinRel(gamma / (gamma + 1.0), 1e-9));
    REQUIRE_THAT(nlos_power / draws, WithinRel(1.0 / (gamma + 1.0), 0.1));
}

TEST_CASE("generate_tsl rejects impossible delay layouts", "[channel][tsl]") {
    SystemConfig cfg;
    numerics::RngStream rng(1, 1);
    TerminalConfig t;
    t.nlos_count = cfg.L;
    REQUIRE_THROWS_AS(generate_tsl(t, cfg, rng), std::invalid_argument);
}

TEST_CASE("propagation of a single unit tap delays the signal", "[channel][propagate]") {
    SystemConfig cfg;
    numerics::RngStream rng(4, 4);
    const ComplexVector s = numerics::complex_gaussian(rng, cfg.frame_len(), 1.0);
    ChannelRealization ch;
    ch.paths.push_back({3, 0.0, ComplexVector::Ones(cfg.antennas())});
    const auto r = propagate({ch}, {&s}, 5, cfg);
    REQUIRE(r.head(3).norm() == 0.0);
    REQUIRE((r.tail(cfg.frame_len() - 3) - s.head(cfg.frame_len() - 3)).norm() < 1e-14);
}

TEST_CASE("AWGN has the requested variance and zero variance is a no-op", "[channel][noise]") {
    numerics::RngStream rng(5, 5);
    const ComplexVector zero = ComplexVector::Zero(100000);
    REQUIRE((add_awgn(zero, 0.0, rng) - zero).norm() == 0.0);
    const auto n = add_awgn(zero, 0.3, rng);
    REQUIRE_THAT(n.squaredNorm() / 100000.0, WithinAbs(0.3, 0.01));
}
