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
#include "tsotfs/modem.hpp"
#include "tsotfs/numerics.hpp"

#include <stdexcept>
#include <vector>

namespace tsotfs::detector {

// ---------------------------------------------------------------------------
// Banded time-varying channel operator of one (terminal, antenna) pair
// ---------------------------------------------------------------------------

inline constexpr Eigen::Index kDenseFrameLimit = 512;

class BandedChannelOperator {
public:
    BandedChannelOperator(const channel::ChannelRealization& ch, int antenna, const SystemConfig& cfg)
        : n_(cfg.frame_len()), denom_(cfg.doppler_phase_denominator()) {
        if (antenna < 0 || (ch.antennas() > 0 && antenna >= ch.antennas()))
            throw std::out_of_range("BandedChannelOperator: antenna index");
        for (const auto& p : ch.paths) taps_.push_back({p.delay, p.doppler, p.gain(antenna)});
    }

    Eigen::Index dim() const { return n_; }
    std::size_t diagonals() const { return taps_.size(); }

    /// y[kappa] = sum_q g_q exp(j 2 pi nu (kappa - l_q) / D) x[kappa - l_q]
    ComplexVector apply(const ComplexVector& x) const {
        check(x);
        ComplexVector y = ComplexVector::Zero(n_);
        for (const auto& t : taps_) {
            const double w = 2.0 * kPi * t.nu / denom_;
            for (Eigen::Index k = t.delay; k < n_; ++k)
                y(k) += t.gain * numerics::cis(w * static_cast<double>(k - t.delay)) * x(k - t.delay);
        }
        return y;
    }

    ComplexVector apply_adjoint(const ComplexVector& y) const {
        check(y);
        ComplexVector x = ComplexVector::Zero(n_);
        for (const auto& t : taps_) {
            const double w = 2.0 * kPi * t.nu / denom_;
            for (Eigen::Index k = t.delay; k < n_; ++k)
                x(k - t.delay) += std::conj(t.gain * numerics::cis(w * static_cast<double>(k - t.delay))) * y(k);
        }
        return x;
    }

    numerics::LinearOperator as_operator() const {
        auto self = *this;
        return {n_, n_, [self](const ComplexVector& x) { return self.apply(x); },
                [self](const ComplexVector& y) { return self.apply_adjoint(y); }};
    }

    /// Dense form, test use only.
    ComplexMatrix dense() const {
        if (n_ > kDenseFrameLimit) throw std::length_error("BandedChannelOperator: dense form above frame length 512");
        ComplexMatrix a = ComplexMatrix::Zero(n_, n_);
        for (Eigen::Index c = 0; c < n_; ++c) {
            ComplexVector e = ComplexVector::Zero(n_);
            e(c) = 1.0;
            a.col(c) = apply(e);
        }
        return a;
    }

private:
    struct Tap {
        int delay;
        double nu;
        cd gain;
    };

    void check(const ComplexVector& v) const {
        if (v.size() != n_) throw std::invalid_argument("BandedChannelOperator: vector length must equal frame length");
    }

    Eigen::Index n_;
    double denom_;
    std::vector<Tap> taps_;
};

inline std::vector<std::vector<BandedChannelOperator>> build_operators(
    const std::vector<channel::ChannelRealization>& links, const SystemConfig& cfg) {
    std::vector<std::vector<BandedChannelOperator>> ops;
    for (const auto& ch : links) {
        std::vector<BandedChannelOperator> per_antenna;
        for (int p = 0; p < cfg.antennas(); ++p) per_antenna.emplace_back(ch, p, cfg);
        ops.push_back(std::move(per_antenna));
    }
    return ops;
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

/// r_p minus the channel-propagated TS-only ring signal of every link.
inline ComplexVector cancel_ts_isi(const ComplexVector& r_p, int antenna,
                                   const std::vector<channel::ChannelRealization>& links,
                                   const std::vector<modem::TrainingSequence>& ts_set, const SystemConfig& cfg) {
    ComplexVector out = r_p;
    for (const auto& ch : links) {
        if (ch.paths.empty()) continue;
        const BandedChannelOperator op(ch, antenna, cfg);
        out -= op.apply(modem::ring_signal(ts_set.at(ch.terminal), cfg));
    }
    return out;
}

/// Drops the leading TS, adds samples [M, M + Mt) of each block onto
/// offsets [0, Mt) and keeps the first M samples: column i is r_hat^i.
inline ComplexMatrix fold_and_strip(const ComplexVector& residual, const SystemConfig& cfg) {
    if (residual.size() != cfg.frame_len()) throw std::invalid_argument("fold_and_strip: frame length mismatch");
    ComplexMatrix out(cfg.M, cfg.N);
    const int fold = std::min(cfg.Mt, cfg.M);
    for (int i = 0; i < cfg.N; ++i) {
        const long base = modem::payload_offset(i, cfg);
        out.col(i) = residual.segment(base, cfg.M);
        out.col(i).head(fold) += residual.segment(base + cfg.M, fold);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-symbol LS system
// ---------------------------------------------------------------------------

/// U^i: (P M) x (Ka M), block (p, k) maps user k's symbol i to antenna p's r_hat^i.
class PerSymbolSystem {
public:
    PerSymbolSystem(int symbol, const std::vector<channel::ChannelRealization>& links, const SystemConfig& cfg)
        : symbol_(symbol), m_(cfg.M), p_(cfg.antennas()), users_(static_cast<int>(links.size())) {
        if (symbol < 0 || symbol >= cfg.N) throw std::out_of_range("PerSymbolSystem: symbol index");
        const long base = modem::payload_offset(symbol, cfg);
        const double d = cfg.doppler_phase_denominator();
        for (int u = 0; u < users_; ++u) {
            for (const auto& path : links[u].paths) {
                Term t;
                t.user = u;
                t.delay = path.delay;
                t.gain = path.gain;
                t.phase.resize(m_);
                for (int m = 0; m < m_; ++m) {
                    const long kappa = m >= path.delay ? base + m : base + m + m_;
                    t.phase(m) = numerics::cis(2.0 * kPi * path.doppler * static_cast<double>(kappa - path.delay) / d);
                }
                terms_.push_back(std::move(t));
            }
        }
    }

    int symbol() const { return symbol_; }
    Eigen::Index in_dim() const { return static_cast<Eigen::Index>(users_) * m_; }
    Eigen::Index out_dim() const { return static_cast<Eigen::Index>(p_) * m_; }

    ComplexVector apply(const ComplexVector& x) const {
        if (x.size() != in_dim()) throw std::invalid_argument("PerSymbolSystem: input length");
        ComplexMatrix y = ComplexMatrix::Zero(m_, p_);
        ComplexVector w(m_);
        for (const auto& t : terms_) {
            const auto xs = x.segment(static_cast<Eigen::Index>(t.user) * m_, m_);
            for (int m = 0; m < m_; ++m) w(m) = t.phase(m) * xs(((m - t.delay) % m_ + m_) % m_);
            y.noalias() += w * t.gain.transpose();
        }
        return Eigen::Map<const ComplexVector>(y.data(), y.size());
    }

    ComplexVector apply_adjoint(const ComplexVector& yv) const {
        if (yv.size() != out_dim()) throw std::invalid_argument("PerSymbolSystem: output length");
        const Eigen::Map<const ComplexMatrix> y(yv.data(), m_, p_);
        ComplexVector x = ComplexVector::Zero(in_dim());
        for (const auto& t : terms_) {
            const ComplexVector w = y * t.gain.conjugate();
            auto xs = x.segment(static_cast<Eigen::Index>(t.user) * m_, m_);
            for (int m = 0; m < m_; ++m) xs(((m - t.delay) % m_ + m_) % m_) += std::conj(t.phase(m)) * w(m);
        }
        return x;
    }

    numerics::LinearOperator as_operator() const {
        auto self = *this;
        return {in_dim(), out_dim(), [self](const ComplexVector& x) { return self.apply(x); },
                [self](const ComplexVector& y) { return self.apply_adjoint(y); }};
    }

    ComplexMatrix dense() const {
        ComplexMatrix a(out_dim(), in_dim());
        for (Eigen::Index c = 0; c < in_dim(); ++c) {
            ComplexVector e = ComplexVector::Zero(in_dim());
            e(c) = 1.0;
            a.col(c) = apply(e);
        }
        return a;
    }

private:
    struct Term {
        int user = 0;
        int delay = 0;
        ComplexVector gain;   // P
        ComplexVector phase;  // M
    };

    int symbol_;
    int m_;
    int p_;
    int users_;
    std::vector<Term> terms_;
};

/// Antenna-stacked right-hand side of symbol i from the folded matrices.
inline ComplexVector stack_rhs(const std::vector<ComplexMatrix>& folded, int symbol) {
    const Eigen::Index m = folded.empty() ? 0 : folded.front().rows();
    ComplexVector b(static_cast<Eigen::Index>(folded.size()) * m);
    for (std::size_t p = 0; p < folded.size(); ++p) b.segment(static_cast<Eigen::Index>(p) * m, m) = folded[p].col(symbol);
    return b;
}

inline numerics::LsqrResult detect_symbol(const PerSymbolSystem& sys, const ComplexVector& rhs, double tol,
                                          int max_iter) {
    return numerics::lsqr_solve(sys.as_operator(), rhs, tol, max_iter);
}

struct DetectionResult {
    int terminal = 0;
    ComplexMatrix payload;  // M x N time-domain estimate
    ComplexMatrix x_dd;
    modem::Bits bits;
    int iterations = 0;     // summed over symbols
    bool converged = true;
    double residual = 0.0;  // max over symbols
};

/// cancel -> fold/strip -> N LSQR solves -> demodulate -> demap.
inline std::vector<DetectionResult> detect_frame(const std::vector<ComplexVector>& rx,
                                                 const std::vector<channel::ChannelRealization>& links,
                                                 const std::vector<modem::TrainingSequence>& ts_set,
                                                 const SystemConfig& cfg) {
    std::vector<DetectionResult> out;
    if (links.empty()) return out;
    if (static_cast<int>(rx.size()) != cfg.antennas()) throw std::invalid_argument("detect_frame: one frame per antenna");
    if (cfg.antennas() < static_cast<int>(links.size()))
        throw std::invalid_argument("detect_frame: P must be >= number of detected terminals");

    std::vector<ComplexMatrix> folded;
    folded.reserve(rx.size());
    for (int p = 0; p < cfg.antennas(); ++p) folded.push_back(fold_and_strip(cancel_ts_isi(rx[p], p, links, ts_set, cfg), cfg));

    out.resize(links.size());
    for (std::size_t u = 0; u < links.size(); ++u) {
        out[u].terminal = links[u].terminal;
        out[u].payload.resize(cfg.M, cfg.N);
    }
    for (int i = 0; i < cfg.N; ++i) {
        const PerSymbolSystem sys(i, links, cfg);
        const auto sol = detect_symbol(sys, stack_rhs(folded, i), cfg.lsqr_tol, cfg.lsqr_max_iter);
        for (std::size_t u = 0; u < links.size(); ++u) {
            out[u].payload.col(i) = sol.x.segment(static_cast<Eigen::Index>(u) * cfg.M, cfg.M);
            out[u].iterations += sol.iterations;
            out[u].converged = out[u].converged && sol.converged;
            out[u].residual = std::max(out[u].residual, sol.residual_norm);
        }
    }
    for (auto& r : out) {
        const ComplexVector flat = Eigen::Map<const ComplexVector>(r.payload.data(), r.payload.size());
        r.x_dd = modem::demodulate(flat, cfg.M, cfg.N);
        r.bits = modem::grid_to_bits(r.x_dd, cfg.bits_per_symbol);
    }
    return out;
}

}  // namespace tsotfs::detector
