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
#include "tsotfs/modem.hpp"
#include "tsotfs/numerics.hpp"

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsotfs::harness {

// Golden-vector file, plain text, one record per block:
//
//   # comment lines start with '#'
//   record <name>
//   config <M> <N> <Mt> <L> <bits_per_symbol> <seed> <terminal>
//   bits <string of 0/1, M*N*bits_per_symbol long>
//   samples <count>
//   <re> <im>            (count lines, %.17g)
//   end
//
// The frame is modulate(bits_to_grid(bits), make_training_sequence(seed, terminal, Mt)).

struct GoldenRecord {
    std::string name;
    SystemConfig cfg;
    std::uint64_t seed = 0;
    int terminal = 0;
    modem::Bits bits;
    ComplexVector samples;
};

inline ComplexVector golden_frame(const SystemConfig& cfg, std::uint64_t seed, int terminal, const modem::Bits& bits) {
    const auto ts = modem::make_training_sequence(seed, terminal, cfg.Mt);
    return modem::modulate(modem::bits_to_grid(bits, cfg), ts).samples;
}

inline GoldenRecord make_golden_record(const std::string& name, const SystemConfig& cfg, std::uint64_t seed,
                                       int terminal) {
    GoldenRecord g;
    g.name = name;
    g.cfg = cfg;
    g.seed = seed;
    g.terminal = terminal;
    numerics::RngStream rng(seed, 0x601de4ULL + static_cast<std::uint64_t>(terminal));
    g.bits.resize(static_cast<std::size_t>(cfg.bits_per_terminal()));
    for (auto& b : g.bits) b = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
    g.samples = golden_frame(cfg, seed, terminal, g.bits);
    return g;
}

inline void write_golden(std::ostream& os, const std::vector<GoldenRecord>& recs) {
    os << "# tsotfs golden frames v1\n";
    char buf[96];
    for (const auto& r : recs) {
        os << "record " << r.name << '\n';
        os << "config " << r.cfg.M << ' ' << r.cfg.N << ' ' << r.cfg.Mt << ' ' << r.cfg.L << ' '
           << r.cfg.bits_per_symbol << ' ' << r.seed << ' ' << r.terminal << '\n';
        os << "bits ";
        for (auto b : r.bits) os << (b ? '1' : '0');
        os << "\nsamples " << r.samples.size() << '\n';
        for (Eigen::Index i = 0; i < r.samples.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r.samples(i).real(), r.samples(i).imag());
            os << buf;
        }
        os << "end\n";
    }
}

inline std::vector<GoldenRecord> read_golden(std::istream& is) {
    std::vector<GoldenRecord> recs;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("golden:" + std::to_string(lineno) + ": " + msg);
    };
    auto next = [&]() -> std::string {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line[0] != '#') return line;
        }
        return {};
    };
    for (std::string l = next(); !l.empty(); l = next()) {
        std::istringstream hs(l);
        std::string tag;
        GoldenRecord r;
        if (!(hs >> tag >> r.name) || tag != "record") fail("expected 'record <name>'");
        std::istringstream cs(next());
        if (!(cs >> tag >> r.cfg.M >> r.cfg.N >> r.cfg.Mt >> r.cfg.L >> r.cfg.bits_per_symbol >> r.seed >> r.terminal) ||
            tag != "config")
            fail("expected 'config M N Mt L bits_per_symbol seed terminal'");
        std::istringstream bs(next());
        std::string bits;
        if (!(bs >> tag >> bits) || tag != "bits") fail("expected 'bits <0/1 string>'");
        for (char c : bits) {
            if (c != '0' && c != '1') fail("bit string may only contain 0 and 1");
            r.bits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        std::istringstream ss(next());
        long count = 0;
        if (!(ss >> tag >> count) || tag != "samples" || count < 0) fail("expected 'samples <count>'");
        r.samples.resize(count);
        for (long i = 0; i < count; ++i) {
            std::istringstream vs(next());
            double re = 0.0, im = 0.0;
            if (!(vs >> re >> im)) fail("expected '<re> <im>'");
            r.samples(i) = cd(re, im);
        }
        if (next() != "end") fail("expected 'end'");
        recs.push_back(std::move(r));
    }
    return recs;
}

/// Small fixture set covering BPSK, QPSK and 16-QAM and L = 1.
inline std::vector<GoldenRecord> default_golden_records() {
    std::vector<GoldenRecord> out;
    SystemConfig a;
    a.M = 4;
    a.N = 2;
    a.Mt = 3;
    a.L = 2;
    a.bits_per_symbol = 2;
    out.push_back(make_golden_record("qpsk_4x2", a, 11, 0));
    SystemConfig b = a;
    b.M = 8;
    b.Mt = 4;
    b.L = 3;
    b.bits_per_symbol = 4;
    out.push_back(make_golden_record("qam16_8x2", b, 12, 3));
    SystemConfig c = a;
    c.N = 1;
    c.Mt = 2;
    c.L = 1;
    c.bits_per_symbol = 1;
    out.push_back(make_golden_record("bpsk_4x1", c, 13, 1));
    return out;
}

}  // namespace tsotfs::harness
