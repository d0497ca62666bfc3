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

#include "tsotfs/harness/metrics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace tsotfs;
using namespace tsotfs::harness;
using Catch::Matchers::WithinAbs;

namespace {

channel::ChannelRealization link(int k, std::vector<int> delays, double nu, int antennas, std::uint64_t seed) {
    numerics::RngStream rng(seed, 3);
    channel::ChannelRealization ch;
    ch.terminal = k;
    for (int d : delays) ch.paths.push_back({d, nu, numerics::complex_gaussian(rng, antennas, 1.0)});
    return ch;
}

TrialMetrics with_nmse(ErrorRatio e) {
    TrialMetrics m;
    m.nmse = e;
    return m;
}

}  // namespace

TEST_CASE("Pe closed forms", "[metrics][pe]") {
    std::vector<bool> t(100, false);
    t[1] = t[40] = t[77] = true;
    auto e = t;
    REQUIRE(trial_pe(t, e) == 0.0);
    e[40] = false;
    REQUIRE_THAT(trial_pe(t, e), WithinAbs(0.01, 1e-15));
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = !t[k];
    REQUIRE(trial_pe(t, e) == 1.0);
    TrialMetrics a, b;
    a.pe = 0.0;
    b.pe = 0.02;
    REQUIRE_THAT(metric_pe({a, b}), WithinAbs(0.01, 1e-15));
    REQUIRE_THROWS_AS(trial_pe(t, std::vector<bool>(3)), std::invalid_argument);
}

TEST_CASE("NMSE closed forms", "[metrics][nmse]") {
    const SystemConfig cfg;
    const auto ch = link(2, {3, 5}, 0.7, cfg.antennas(), 1);
    const std::vector<channel::ChannelRealization> truth{ch};

    REQUIRE(metric_nmse_db({with_nmse(cir_error(truth, truth, cfg))}) == kNmseFloorDb);
    REQUIRE_THAT(metric_nmse_db({with_nmse(cir_error(truth, {}, cfg))}), WithinAbs(0.0, 1e-12));

    for (double eps : {0.1, 0.01, 1e-4}) {
        auto scaled = ch;
        for (auto& p : scaled.paths) p.gain *= 1.0 + eps;
        REQUIRE_THAT(metric_nmse_db({with_nmse(cir_error(truth, {scaled}, cfg))}), WithinAbs(20.0 * std::log10(eps), 1e-8));
    }
}

TEST_CASE("NMSE charges spurious taps and hallucinated terminals", "[metrics][nmse]") {
    const SystemConfig cfg;
    const auto ch = link(2, {3}, 0.0, cfg.antennas(), 2);
    auto extra = ch;
    extra.paths.push_back({6, 0.0, ch.paths[0].gain});
    const auto r = cir_error({ch}, {extra}, cfg);
    // same gain on a tap the truth leaves empty: error energy spans kappa >= 6, truth energy kappa >= 3
    const double f = cfg.frame_len();
    REQUIRE_THAT(r.ratio(), WithinAbs((f - 6.0) / (f - 3.0), 1e-12));

    const auto ghost = link(9, {0}, 0.0, cfg.antennas(), 3);
    const auto g = cir_error({ch}, {ch, ghost}, cfg);
    REQUIRE(g.num > 0.0);
}

TEST_CASE("NMSE over trials averages linear ratios and skips empty truth", "[metrics][nmse]") {
    ErrorRatio a{1.0, 10.0}, b{3.0, 10.0}, none{0.0, 0.0};
    REQUIRE_THAT(metric_nmse_db({with_nmse(a), with_nmse(b), with_nmse(none)}), WithinAbs(10.0 * std::log10(0.2), 1e-12));
    REQUIRE(std::isnan(metric_nmse_db({with_nmse(none)})));
    REQUIRE(std::isnan(metric_nmse_db({})));
}

TEST_CASE("BER closed forms", "[metrics][ber]") {
    BerCounts b;
    b.bits_per_terminal = 64 * 8 * 2;
    b.true_active = 3;
    REQUIRE(b.ber() == 0.0);
    b.true_active = 2;
    b.false_terminals = 1;
    REQUIRE(b.ber() == 0.5);
    b.true_active = 1;
    b.false_terminals = 0;
    b.bit_errors = 7;
    REQUIRE_THAT(b.ber(), WithinAbs(7.0 / 1024.0, 1e-15));
    b.false_terminals = 3;
    REQUIRE(b.ber() == 1.0);  // capped
    BerCounts none;
    none.bits_per_terminal = 10;
    REQUIRE(none.ber() == 0.0);
    none.false_terminals = 1;
    REQUIRE(none.ber() == 1.0);
}

TEST_CASE("confidence half-width", "[metrics]") {
    REQUIRE(half_width({}) == 0.0);
    REQUIRE(half_width({1.0}) == 0.0);
    REQUIRE(half_width({2.0, 2.0, 2.0}) == 0.0);
    // sample sd of {0, 1} is 1/sqrt(2)
    REQUIRE_THAT(half_width({0.0, 1.0}), WithinAbs(1.96 * std::sqrt(0.5 / 2.0), 1e-12));
}
