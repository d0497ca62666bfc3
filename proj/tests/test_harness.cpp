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

#include "tsotfs/harness/cli.hpp"
#include "tsotfs/harness/config_file.hpp"
#include "tsotfs/harness/golden.hpp"
#include "tsotfs/harness/scenario.hpp"
#include "tsotfs/harness/selftest.hpp"
#include "tsotfs/harness/sweep.hpp"
#include "tsotfs/harness/trial.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tsotfs;
using namespace tsotfs::harness;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

const std::string kData = TSOTFS_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tsotfs_tests";
    fs::create_directories(dir);
    return dir / name;
}

struct CliRun {
    int rc = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tsotfs");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    CliRun r;
    r.rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

ConfigError config_error(const std::string& text) {
    try {
        parse_run_config(text, "t.yaml");
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("", 0, 0, "");
}

TrialOptions quiet() {
    TrialOptions o;
    o.noise = NoiseMode::Variance;
    o.noise_variance = 0.0;
    return o;
}

}  // namespace

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

TEST_CASE("azimuth distance wraps around the circle", "[harness][scenario]") {
    REQUIRE_THAT(azimuth_distance(359.0, 1.0), WithinAbs(2.0, 1e-12));
    REQUIRE_THAT(azimuth_distance(10.0, 190.0), WithinAbs(180.0, 1e-12));
    REQUIRE_THAT(azimuth_distance(30.0, 20.0), WithinAbs(10.0, 1e-12));
}

TEST_CASE("scenarios place exactly Ka active terminals", "[harness][scenario]") {
    SystemConfig cfg;
    for (int ka : {0, 1, 5}) {
        cfg.Ka = ka;
        numerics::RngStream rng(1, static_cast<std::uint64_t>(ka));
        const auto s = generate_scenario(cfg, rng);
        REQUIRE(static_cast<int>(s.terminals.size()) == cfg.K);
        REQUIRE(static_cast<int>(s.active.size()) == ka);
        REQUIRE(s.links.size() == s.active.size());
        int flagged = 0;
        for (const auto& t : s.terminals) flagged += t.active;
        REQUIRE(flagged == ka);
        for (std::size_t i = 0; i < s.active.size(); ++i) REQUIRE(s.links[i].terminal == s.active[i]);
    }
}

TEST_CASE("1000 scenarios with Ka = 10 never violate the spacing rule", "[harness][scenario]") {
    SystemConfig cfg = paper_profile();
    cfg.Px = cfg.Py = 2;  // geometry only; keeps the steering vectors small
    int violations = 0;
    for (int n = 0; n < 1000; ++n) {
        numerics::RngStream rng(2, static_cast<std::uint64_t>(n));
        const auto s = generate_scenario(cfg, rng);
        for (std::size_t i = 0; i < s.active.size(); ++i)
            for (std::size_t j = i + 1; j < s.active.size(); ++j) {
                const auto& a = s.terminals[s.active[i]];
                const auto& b = s.terminals[s.active[j]];
                const bool ok = std::abs(a.zenith_deg - b.zenith_deg) >= cfg.min_zenith_spacing_deg ||
                                azimuth_distance(a.azimuth_deg, b.azimuth_deg) >= cfg.min_azimuth_spacing_deg;
                violations += !ok;
            }
    }
    REQUIRE(violations == 0);
}

TEST_CASE("zero-Doppler scenarios carry no Doppler", "[harness][scenario]") {
    numerics::RngStream rng(3, 3);
    const auto s = generate_scenario(SystemConfig{}, rng, true);
    for (const auto& ch : s.links) REQUIRE(ch.doppler() == 0.0);
}

// ---------------------------------------------------------------------------
// trials
// ---------------------------------------------------------------------------

TEST_CASE("a trial is a pure function of (seed, trial index)", "[harness][trial]") {
    const auto ctx = TrialContext::make(desk_profile(), 4);
    TrialOptions o;
    o.noise = NoiseMode::Snr;
    const auto a = run_trial(ctx, o, 3);
    const auto b = run_trial(ctx, o, 3);
    const auto c = run_trial(ctx, o, 4);
    REQUIRE(a.alpha == b.alpha);
    REQUIRE(a.alpha_hat == b.alpha_hat);
    REQUIRE(a.support == b.support);
    REQUIRE(a.tx_bits == b.tx_bits);
    REQUIRE(a.rx_bits == b.rx_bits);
    REQUIRE(a.noise_variance == b.noise_variance);
    REQUIRE(a.metrics.nmse.num == b.metrics.nmse.num);
    REQUIRE(a.metrics.oracle_nmse.num == b.metrics.oracle_nmse.num);
    REQUIRE(a.metrics.ber.bit_errors == b.metrics.ber.bit_errors);
    REQUIRE(a.alpha != c.alpha);
}

TEST_CASE("noiseless trials with genie CSI have Pe = 0 and BER = 0", "[harness][trial]") {
    const auto ctx = TrialContext::make(desk_g40_profile(), 5);
    auto o = quiet();
    o.genie_csi = true;
    for (int t = 0; t < 3; ++t) {
        const auto r = run_trial(ctx, o, t);
        REQUIRE(r.metrics.pe == 0.0);
        REQUIRE(r.metrics.ber.ber() == 0.0);
        REQUIRE(r.lsqr_converged);
    }
}

TEST_CASE("noiseless estimated trials recover the channel", "[harness][trial]") {
    const auto ctx = TrialContext::make(desk_g40_profile(), 6);
    auto o = quiet();
    o.coarse = true;
    const auto r = run_trial(ctx, o, 0);
    REQUIRE(r.metrics.pe == 0.0);
    REQUIRE(r.metrics.ber.ber() == 0.0);
    REQUIRE(10.0 * std::log10(r.metrics.nmse.ratio()) < -80.0);
    REQUIRE(10.0 * std::log10(r.metrics.coarse_nmse.ratio()) > -30.0);
}

TEST_CASE("with no active terminal Pe only counts false alarms", "[harness][trial]") {
    SystemConfig cfg = desk_profile();
    cfg.Ka = 0;
    const auto ctx = TrialContext::make(cfg, 7);
    const auto r = run_trial(ctx, quiet(), 0);
    REQUIRE(r.truth.empty());
    REQUIRE(r.metrics.pe == 0.0);
    REQUIRE(r.metrics.ber.ber() == 0.0);
    REQUIRE_FALSE(r.metrics.nmse.valid());
}

TEST_CASE("SNR noise mode fixes the SNR of a unit-power link", "[harness][trial]") {
    const SystemConfig cfg = desk_profile();
    numerics::RngStream rng(8, 8);
    const auto s = generate_scenario(cfg, rng);
    TrialOptions o;
    o.noise = NoiseMode::Snr;
    o.snr_db = 10.0;
    const double var = noise_variance_for(s, o, cfg);
    REQUIRE_THAT(var, WithinAbs(1.0 / (cfg.antennas() * 10.0), 1e-15));
    o.noise = NoiseMode::Variance;
    o.noise_variance = 0.25;
    REQUIRE(noise_variance_for(s, o, cfg) == 0.25);
    o.noise_variance = -1.0;
    REQUIRE_THROWS_AS(noise_variance_for(s, o, cfg), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// sweep and CSV
// ---------------------------------------------------------------------------

TEST_CASE("one axis point with one trial gives one CSV row", "[harness][sweep]") {
    ExperimentConfig e;
    e.trials = 1;
    const auto rows = run_sweep(e);
    REQUIRE(rows.size() == 1);
    std::ostringstream os;
    write_csv(os, rows);
    std::istringstream is(os.str());
    std::string header, line, extra;
    std::getline(is, header);
    std::getline(is, line);
    REQUIRE(header == "axis_value,trials,pe,nmse_db,ber,oracle_nmse_db,mean_somp_iters,mean_lsqr_iters,wall_ms");
    REQUIRE_THAT(line, StartsWith("10,1,"));
    REQUIRE_THAT(line, Catch::Matchers::EndsWith(",0"));
    REQUIRE_FALSE(std::getline(is, extra));
}

TEST_CASE("serial and parallel sweeps produce identical CSV bytes", "[harness][sweep]") {
    ExperimentConfig e;
    e.system = desk_g40_profile();
    e.trial.noise = NoiseMode::Snr;
    e.axis = SweepAxis::Ka;
    e.values = {2, 4};
    e.trials = 4;
    e.seed = 3;
    std::ostringstream serial, parallel, again;
    write_csv(serial, run_sweep(e));
    e.workers = 3;
    write_csv(parallel, run_sweep(e));
    write_csv(again, run_sweep(e));
    REQUIRE(serial.str() == parallel.str());
    REQUIRE(parallel.str() == again.str());
}

TEST_CASE("oracle NMSE never exceeds the proposed NMSE on a G sweep", "[harness][sweep]") {
    ExperimentConfig e;
    e.system = desk_g40_profile();
    e.trial.noise = NoiseMode::Snr;
    e.trial.snr_db = 15.0;
    e.trial.detect = false;
    e.values = {10, 20, 30, 40, 50};
    e.trials = 6;
    e.seed = 4;
    const auto rows = run_sweep(e);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        REQUIRE(r.oracle_nmse_db <= r.nmse_db + 1e-12);
        REQUIRE(std::isfinite(r.nmse_db));
        REQUIRE(r.pe >= 0.0);
        REQUIRE(r.pe <= 1.0);
    }
    // NMSE improves with G; the half-width is on the linear scale
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double prev = std::pow(10.0, rows[i - 1].nmse_db / 10.0);
        const double cur = std::pow(10.0, rows[i].nmse_db / 10.0);
        REQUIRE(cur <= prev + rows[i - 1].nmse_half_width + rows[i].nmse_half_width);
    }
}

TEST_CASE("experiment validation", "[harness][sweep]") {
    ExperimentConfig e;
    e.trials = 0;
    REQUIRE_THROWS_AS(e.validate(), std::invalid_argument);
    e.trials = 1;
    e.values = {20, 10};
    REQUIRE_THROWS_AS(e.validate(), std::invalid_argument);
    e.values = {};
    REQUIRE_THROWS_AS(e.validate(), std::invalid_argument);
    e.values = {10.5};
    REQUIRE_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("CSV numbers", "[harness][csv]") {
    REQUIRE(format_number(std::nan("")) == "nan");
    REQUIRE(format_number(0.25) == "0.25");
    REQUIRE(format_number(-120.0) == "-120");
}

TEST_CASE("tiny sweep matches the golden CSV fixture", "[harness][golden]") {
    const auto rc = load_run_config(kData + "/tiny_sweep.yaml");
    std::ostringstream os;
    write_csv(os, run_sweep(rc.experiment));
    REQUIRE(os.str() == slurp(kData + "/tiny_sweep.csv"));
}

// ---------------------------------------------------------------------------
// config files
// ---------------------------------------------------------------------------

TEST_CASE("a full config parses into the experiment", "[harness][config]") {
    const auto rc = load_run_config(kData + "/../../configs/desk_single.yaml");
    REQUIRE(rc.profile == "desk");
    const auto& e = rc.experiment;
    REQUIRE(e.system.M == 64);
    REQUIRE(e.system.G() == 10);
    REQUIRE(e.trial.noise == NoiseMode::Snr);
    REQUIRE(e.trial.snr_db == 15.0);
    REQUIRE(e.axis == SweepAxis::G);
    REQUIRE(e.values == std::vector<double>{10});
    REQUIRE(e.trials == 10);
    REQUIRE(rc.link_budget.size() == 3);
}

TEST_CASE("profiles and overrides", "[harness][config]") {
    REQUIRE(parse_run_config("").experiment.system.M == 64);
    REQUIRE(parse_run_config("profile: paper\n").experiment.system.M == 256);
    REQUIRE(parse_run_config("profile: paper\n", "t", std::string("desk")).experiment.system.M == 64);
    const auto rc = parse_run_config("profile: desk-g40\nsystem:\n  Ka: 3\n");
    REQUIRE(rc.experiment.system.G() == 40);
    REQUIRE(rc.experiment.system.Ka == 3);
    REQUIRE(rc.experiment.values == std::vector<double>{40});
}

TEST_CASE("config errors are anchored to line and column", "[harness][config]") {
    {
        const auto e = config_error("experiment:\n  axis: Ka\n  values: [1]\n  trials: 0\n");
        REQUIRE(e.line() == 4);
        REQUIRE_THAT(std::string(e.what()), StartsWith("t.yaml:4:"));
        REQUIRE_THAT(std::string(e.what()), ContainsSubstring("trials"));
    }
    {
        const auto e = config_error("system:\n  M: 64\n  bogus: 1\n");
        REQUIRE(e.line() == 3);
        REQUIRE_THAT(std::string(e.what()), ContainsSubstring("bogus"));
    }
    {
        const auto e = config_error("system:\n  M: sixty\n");
        REQUIRE(e.line() == 2);
    }
    {
        const auto e = config_error("system: [1, 2\n");
        REQUIRE(e.line() >= 1);
    }
    {
        const auto e = config_error("noise:\n  mode: loud\n");
        REQUIRE(e.line() == 2);
        REQUIRE_THAT(std::string(e.what()), ContainsSubstring("loud"));
    }
    {
        const auto e = config_error("profile: huge\n");
        REQUIRE(e.line() == 1);
    }
    {
        const auto e = config_error("system:\n  Mt: 4\n");
        REQUIRE(e.line() == 2);
        REQUIRE_THAT(std::string(e.what()), ContainsSubstring("Mt"));
    }
    {
        const auto e = config_error("experiment:\n  axis: Ka\n");
        REQUIRE(e.line() == 2);
    }
    {
        const auto e = config_error("extra: 1\n");
        REQUIRE(e.line() == 1);
    }
}

// ---------------------------------------------------------------------------
// golden frames
// ---------------------------------------------------------------------------

TEST_CASE("golden frames match the fixture", "[harness][golden]") {
    std::ifstream f(kData + "/golden_frames.txt");
    REQUIRE(f.good());
    const auto stored = read_golden(f);
    const auto fresh = default_golden_records();
    REQUIRE(stored.size() == fresh.size());
    for (std::size_t i = 0; i < stored.size(); ++i) {
        REQUIRE(stored[i].name == fresh[i].name);
        REQUIRE(stored[i].bits == fresh[i].bits);
        REQUIRE(stored[i].samples.size() == fresh[i].samples.size());
        REQUIRE((stored[i].samples - fresh[i].samples).norm() < 1e-12);
    }
}

TEST_CASE("golden records round-trip through text", "[harness][golden]") {
    const auto recs = default_golden_records();
    std::stringstream ss;
    write_golden(ss, recs);
    const auto back = read_golden(ss);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) REQUIRE((back[i].samples - recs[i].samples).norm() == 0.0);
    std::istringstream bad("record x\nnonsense\n");
    REQUIRE_THROWS(read_golden(bad));
}

// ---------------------------------------------------------------------------
// self-test and command line
// ---------------------------------------------------------------------------

TEST_CASE("every self-test check passes", "[harness][selftest]") {
    for (const auto& c : selftest_checks()) {
        INFO(c.name);
        REQUIRE(c.run().pass);
    }
}

TEST_CASE("cli efficiency and linkbudget print the reference tables", "[harness][cli]") {
    const auto e = cli({"efficiency"});
    REQUIRE(e.rc == 0);
    for (const char* v : {"74.54%", "69.48%", "64.92%", "60.79%"}) REQUIRE_THAT(e.out, ContainsSubstring(v));
    const auto l = cli({"linkbudget"});
    REQUIRE(l.rc == 0);
    for (const char* v : {"case1", "case2", "case3", "14.57", "13.72", "11.61"}) REQUIRE_THAT(l.out, ContainsSubstring(v));
    const auto s = cli({"selftest"});
    REQUIRE(s.rc == 0);
    REQUIRE_THAT(s.out, ContainsSubstring("all checks passed"));
}

TEST_CASE("cli sweep with trials = 0 is a config error", "[harness][cli]") {
    const auto p = scratch("zero.yaml");
    std::ofstream(p) << "experiment:\n  axis: Ka\n  values: [1]\n  trials: 0\n";
    const auto r = cli({"--config", p.string(), "sweep"});
    REQUIRE(r.rc == 2);
    REQUIRE_THAT(r.err, ContainsSubstring(p.string() + ":4:"));
}

TEST_CASE("cli usage errors", "[harness][cli]") {
    REQUIRE(cli({}).rc == 2);
    REQUIRE(cli({"frobnicate"}).rc == 2);
    REQUIRE(cli({"--profile", "huge", "efficiency"}).rc == 2);
    REQUIRE(cli({"--workers", "0", "efficiency"}).rc == 2);
    REQUIRE(cli({"--config", "/nonexistent/file.yaml", "sweep"}).rc == 2);
    REQUIRE(cli({"--help"}).rc == 0);
}

TEST_CASE("cli sweep writes CSV and a JSON manifest", "[harness][cli]") {
    const auto cfg = scratch("sweep.yaml");
    std::ofstream(cfg) << "noise:\n  mode: snr\nexperiment:\n  axis: Ka\n  values: [1, 2]\n  trials: 2\n";
    const auto csv = scratch("sweep.csv");
    const auto man = scratch("sweep.json");
    const auto r = cli({"--config", cfg.string(), "--seed", "17", "--workers", "2", "--out", csv.string(), "--manifest",
                        man.string(), "sweep"});
    REQUIRE(r.rc == 0);
    const auto text = slurp(csv);
    REQUIRE_THAT(text, StartsWith(kCsvHeader));
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 3);
    const auto j = nlohmann::json::parse(slurp(man));
    REQUIRE(j["config"]["seed"] == 17);
    REQUIRE(j["config"]["workers"] == 2);
    REQUIRE(j["config"]["axis"] == "Ka");
    REQUIRE(j["rows"].size() == 2);
    REQUIRE(j["versions"].contains("eigen"));
    REQUIRE(j["timing"]["total_ms"].get<double>() >= 0.0);

    // stdout when --out is absent
    const auto s = cli({"--config", cfg.string(), "--seed", "17", "sweep"});
    REQUIRE(s.rc == 0);
    REQUIRE(s.out == text);
}

TEST_CASE("cli run prints a verbose trial and the SOMP dump", "[harness][cli]") {
    const auto dump = scratch("somp.txt");
    const auto r = cli({"--profile", "desk-g40", "run", "--trial", "2", "--dump-somp", dump.string()});
    REQUIRE(r.rc == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("true terminals:"));
    REQUIRE_THAT(r.out, ContainsSubstring("estimated terminals:"));
    const auto d = slurp(dump);
    REQUIRE_THAT(d, StartsWith("# somp "));
    REQUIRE_THAT(d, ContainsSubstring("iter 1 atom "));
    REQUIRE_THAT(d, ContainsSubstring("done iterations "));
}
