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
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsotfs::modem {

using Bits = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Gray-coded square QAM
//
// Bits per symbol M_b = 1 is BPSK (0 -> +1). For even M_b the first M_b/2
// bits select the in-phase level and the remaining bits the quadrature level.
// An axis word w chooses level (2^m - 1) - 2 * gray_decode(w), so QPSK "00"
// maps to (1 + j)/sqrt(2). Constellations have unit average energy.
// ---------------------------------------------------------------------------

inline void check_bits_per_symbol(int mb) {
    if (mb != 1 && (mb < 2 || mb > 12 || mb % 2 != 0))
        throw std::invalid_argument("qam: bits per symbol must be 1 or an even number in [2, 12], got " +
                                    std::to_string(mb));
}

inline unsigned gray_decode(unsigned g) {
    unsigned b = g;
    for (unsigned s = g >> 1; s != 0; s >>= 1) b ^= s;
    return b;
}

inline unsigned gray_encode(unsigned b) { return b ^ (b >> 1); }

inline double qam_scale(int mb) {
    if (mb == 1) return 1.0;
    const double side = std::ldexp(1.0, mb / 2);  // 2^m
    return std::sqrt(3.0 / (2.0 * (side * side - 1.0)));
}

inline ComplexVector qam_map(const Bits& bits, int mb) {
    check_bits_per_symbol(mb);
    if (bits.size() % static_cast<std::size_t>(mb) != 0)
        throw std::invalid_argument("qam_map: bit count not divisible by bits per symbol");
    const Eigen::Index n = static_cast<Eigen::Index>(bits.size()) / mb;
    ComplexVector out(n);
    if (mb == 1) {
        for (Eigen::Index i = 0; i < n; ++i) out(i) = bits[i] ? -1.0 : 1.0;
        return out;
    }
    const int m = mb / 2;
    const double top = std::ldexp(1.0, m) - 1.0;
    const double scale = qam_scale(mb);
    auto axis = [&](std::size_t pos) {
        unsigned w = 0;
        for (int b = 0; b < m; ++b) w = (w << 1) | (bits[pos + b] & 1u);
        return (top - 2.0 * gray_decode(w)) * scale;
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t base = static_cast<std::size_t>(i) * mb;
        out(i) = cd(axis(base), axis(base + m));
    }
    return out;
}

inline Bits qam_demap(const ComplexVector& symbols, int mb) {
    check_bits_per_symbol(mb);
    Bits bits;
    bits.reserve(static_cast<std::size_t>(symbols.size()) * mb);
    if (mb == 1) {
        for (Eigen::Index i = 0; i < symbols.size(); ++i) bits.push_back(symbols(i).real() < 0.0 ? 1 : 0);
        return bits;
    }
    const int m = mb / 2;
    const int levels = 1 << m;
    const double top = levels - 1.0;
    const double scale = qam_scale(mb);
    auto axis = [&](double x) {
        long pos = std::lround((top - x / scale) / 2.0);
        pos = std::clamp(pos, 0L, static_cast<long>(levels - 1));
        const unsigned w = gray_encode(static_cast<unsigned>(pos));
        for (int b = m - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((w >> b) & 1u));
    };
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        axis(symbols(i).real());
        axis(symbols(i).imag());
    }
    return bits;
}

/// Every constellation point, indexed by the integer formed from its bit label.
inline ComplexVector qam_constellation(int mb) {
    check_bits_per_symbol(mb);
    const unsigned count = 1u << mb;
    Bits bits;
    for (unsigned v = 0; v < count; ++v)
        for (int b = mb - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1u));
    return qam_map(bits, mb);
}

// ---------------------------------------------------------------------------
// Delay-Doppler transforms (unitary DFTs)
// ---------------------------------------------------------------------------

/// X_TF = F_M X_DD F_N^H
inline ComplexMatrix isfft(const ComplexMatrix& x_dd) {
    return numerics::unitary_dft(x_dd.rows()) * x_dd * numerics::unitary_dft(x_dd.cols()).adjoint();
}

/// X_DD = F_M^H X_TF F_N
inline ComplexMatrix sfft(const ComplexMatrix& x_tf) {
    return numerics::unitary_dft(x_tf.rows()).adjoint() * x_tf * numerics::unitary_dft(x_tf.cols());
}

/// Rectangular-window Heisenberg transform: S = F_M^H X_TF.
inline ComplexMatrix heisenberg(const ComplexMatrix& x_tf) { return numerics::unitary_dft(x_tf.rows()).adjoint() * x_tf; }

/// Wigner transform (inverse of heisenberg): X_TF = F_M S.
inline ComplexMatrix wigner(const ComplexMatrix& s) { return numerics::unitary_dft(s.rows()) * s; }

// ---------------------------------------------------------------------------
// Training sequences and frames
// ---------------------------------------------------------------------------

struct TrainingSequence {
    int terminal = 0;
    ComplexVector samples;
};

inline constexpr std::uint64_t kTrainingStreamBase = 0x7453000000000000ULL;

/// Unit-variance complex Gaussian TS, a pure function of (global seed, k).
inline TrainingSequence make_training_sequence(std::uint64_t global_seed, int k, int mt) {
    if (mt < 1) throw std::invalid_argument("make_training_sequence: length must be >= 1");
    numerics::RngStream rng(global_seed, kTrainingStreamBase + static_cast<std::uint64_t>(k));
    return {k, numerics::complex_gaussian(rng, mt, 1.0)};
}

inline std::vector<TrainingSequence> make_training_set(std::uint64_t global_seed, const SystemConfig& cfg) {
    std::vector<TrainingSequence> set;
    set.reserve(cfg.K);
    for (int k = 0; k < cfg.K; ++k) set.push_back(make_training_sequence(global_seed, k, cfg.Mt));
    return set;
}

/// Start of TS slot j (0-based, j in [0, N]).
inline long ts_offset(int j, const SystemConfig& cfg) { return static_cast<long>(j) * cfg.block_len(); }
/// Start of payload symbol n (0-based, n in [0, N)).
inline long payload_offset(int n, const SystemConfig& cfg) { return static_cast<long>(n) * cfg.block_len() + cfg.Mt; }

/// [c, s_1, c, s_2, ..., c, s_N, c]
struct TsOtfsFrame {
    ComplexVector samples;
    ComplexMatrix payload;  // M x N time-domain symbols
    TrainingSequence ts;
};

inline TsOtfsFrame assemble_frame(const ComplexMatrix& payload, const TrainingSequence& ts) {
    const int m = static_cast<int>(payload.rows());
    const int n = static_cast<int>(payload.cols());
    const int mt = static_cast<int>(ts.samples.size());
    if (m < 1 || n < 1 || mt < 1) throw std::invalid_argument("assemble_frame: empty payload or TS");
    TsOtfsFrame f;
    f.payload = payload;
    f.ts = ts;
    f.samples.resize(static_cast<Eigen::Index>(mt) * (n + 1) + static_cast<Eigen::Index>(m) * n);
    const Eigen::Index block = m + mt;
    for (int j = 0; j <= n; ++j) f.samples.segment(j * block, mt) = ts.samples;
    for (int j = 0; j < n; ++j) f.samples.segment(j * block + mt, m) = payload.col(j);
    return f;
}

/// TS-only "ring" signal [c, 0_M, c, ..., 0_M, c].
inline ComplexVector ring_signal(const TrainingSequence& ts, const SystemConfig& cfg) {
    ComplexVector r = ComplexVector::Zero(cfg.frame_len());
    for (int j = 0; j <= cfg.N; ++j) r.segment(ts_offset(j, cfg), cfg.Mt) = ts.samples;
    return r;
}

inline ComplexMatrix bits_to_grid(const Bits& bits, const SystemConfig& cfg) {
    const ComplexVector sym = qam_map(bits, cfg.bits_per_symbol);
    if (sym.size() != static_cast<Eigen::Index>(cfg.M) * cfg.N)
        throw std::invalid_argument("bits_to_grid: expected M*N*M_b bits");
    return Eigen::Map<const ComplexMatrix>(sym.data(), cfg.M, cfg.N);  // column-major fill
}

inline Bits grid_to_bits(const ComplexMatrix& x_dd, int mb) {
    const ComplexVector flat = Eigen::Map<const ComplexVector>(x_dd.data(), x_dd.size());
    return qam_demap(flat, mb);
}

/// DD grid -> time-domain payload -> framed samples.
inline TsOtfsFrame modulate(const ComplexMatrix& x_dd, const TrainingSequence& ts) {
    return assemble_frame(heisenberg(isfft(x_dd)), ts);
}

/// Serial-to-parallel, Wigner, SFFT on a stripped M*N payload vector.
inline ComplexMatrix demodulate(const ComplexVector& payload, int M, int N) {
    if (payload.size() != static_cast<Eigen::Index>(M) * N)
        throw std::invalid_argument("demodulate: payload length must be M*N");
    const ComplexMatrix s = Eigen::Map<const ComplexMatrix>(payload.data(), M, N);
    return sfft(wigner(s));
}

/// Payload samples of a frame with the TS slots removed (column-major M x N).
inline ComplexVector strip_training(const ComplexVector& frame, const SystemConfig& cfg) {
    ComplexVector out(cfg.payload_len());
    for (int n = 0; n < cfg.N; ++n) out.segment(static_cast<Eigen::Index>(n) * cfg.M, cfg.M) = frame.segment(payload_offset(n, cfg), cfg.M);
    return out;
}

/// Proposed-scheme efficiency M (M + L - 1) N^2 / [Mt (N + 1) + M N]^2.
inline double transmission_efficiency(int M, int N, int L, int Mt) {
    if (M < 1 || N < 1 || L < 1 || Mt < 1) throw std::invalid_argument("transmission_efficiency: sizes must be >= 1");
    const double frame = static_cast<double>(Mt) * (N + 1) + static_cast<double>(M) * N;
    return static_cast<double>(M) * (M + L - 1) * N * N / (frame * frame);
}

inline double transmission_efficiency(const SystemConfig& cfg) {
    return transmission_efficiency(cfg.M, cfg.N, cfg.L, cfg.Mt);
}

}  // namespace tsotfs::modem
