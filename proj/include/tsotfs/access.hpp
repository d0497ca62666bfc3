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

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace tsotfs::access {

// ---------------------------------------------------------------------------
// Measurement model
// ---------------------------------------------------------------------------

/// G x K*L dictionary; column k*L + l holds c_k[L-1-l+g], g = 0..G-1.
struct SensingMatrix {
    ComplexMatrix psi;
    int K = 0;
    int L = 0;
    int G = 0;

    int terminal_of(int column) const { return column / L; }
    int tap_of(int column) const { return column % L; }
    int column(int k, int l) const { return k * L + l; }
};

inline SensingMatrix build_sensing(const std::vector<modem::TrainingSequence>& ts_set, int L, int G) {
    if (ts_set.empty()) throw std::invalid_argument("build_sensing: empty TS set");
    if (L < 1 || G < 1) throw std::invalid_argument("build_sensing: L and G must be >= 1");
    SensingMatrix s;
    s.K = static_cast<int>(ts_set.size());
    s.L = L;
    s.G = G;
    s.psi.resize(G, static_cast<Eigen::Index>(s.K) * L);
    for (int k = 0; k < s.K; ++k) {
        const auto& c = ts_set[k].samples;
        if (c.size() < L - 1 + G) throw std::invalid_argument("build_sensing: TS shorter than L - 1 + G");
        for (int l = 0; l < L; ++l) s.psi.col(s.column(k, l)) = c.segment(L - 1 - l, G);
    }
    return s;
}

/// Non-ISI region of TS slot i (0-based, i in [0, N]) of one antenna's frame.
inline ComplexVector extract_non_isi(const ComplexVector& r, int i, const SystemConfig& cfg) {
    if (i < 0 || i > cfg.N) throw std::out_of_range("extract_non_isi: TS index outside [0, N]");
    const long start = modem::ts_offset(i, cfg) + cfg.L - 1;
    if (r.size() < start + cfg.G()) throw std::invalid_argument("extract_non_isi: frame too short");
    return r.segment(start, cfg.G());
}

/// R_TS: G x P(N+1), column i*P + p is the non-ISI region of TS i at antenna p.
struct MmvMeasurement {
    ComplexMatrix r_ts;
    int antennas = 0;
    int slots = 0;

    /// (N+1) x P view of one row of a coefficient matrix with this layout.
    ComplexMatrix slot_by_antenna(const ComplexMatrix& rows, Eigen::Index row) const {
        ComplexMatrix out(slots, antennas);
        for (int i = 0; i < slots; ++i)
            for (int p = 0; p < antennas; ++p) out(i, p) = rows(row, static_cast<Eigen::Index>(i) * antennas + p);
        return out;
    }
};

inline MmvMeasurement build_measurement(const std::vector<ComplexVector>& rx, const SystemConfig& cfg) {
    if (static_cast<int>(rx.size()) != cfg.antennas())
        throw std::invalid_argument("build_measurement: need one frame per antenna");
    MmvMeasurement m;
    m.antennas = cfg.antennas();
    m.slots = cfg.N + 1;
    m.r_ts.resize(cfg.G(), static_cast<Eigen::Index>(m.antennas) * m.slots);
    for (int i = 0; i < m.slots; ++i)
        for (int p = 0; p < m.antennas; ++p)
            m.r_ts.col(static_cast<Eigen::Index>(i) * m.antennas + p) = extract_non_isi(rx[p], i, cfg);
    return m;
}

// ---------------------------------------------------------------------------
// Stage 1: SOMP
// ---------------------------------------------------------------------------

struct SompIteration {
    int selected = -1;
    double residual_sq = 0.0;  // after the LS update
};

struct SompResult {
    std::vector<int> support;  // selection order
    ComplexMatrix coefficients;  // |support| x cols, rows in selection order
    std::vector<SompIteration> trace;
    double initial_residual_sq = 0.0;
    double threshold = 0.0;
    bool hit_max_iter = false;
};

/// Atom selection rule.
/// Correlation: sum_cols |psi_a^H R| / ||psi_a||.
/// RankAware: ||U_r^H psi_a|| / ||P_perp psi_a||, U_r an orthonormal basis of the
/// residual signal subspace (eigenvalues of R R^H above cols * pi_th and above
/// 1e-10 of the largest) and P_perp the projector off the selected atoms. Falls
/// back to the correlation score when that subspace spans the whole complement.
enum class SompRule { Correlation, RankAware };

/// Stops once ||R||_F^2 < P G (N+1) pi_th, after T_max atoms, or when |I| = G.
inline SompResult somp(const MmvMeasurement& meas, const SensingMatrix& dict, int t_max, double pi_th,
                       SompRule rule = SompRule::Correlation) {
    if (!(pi_th > 0.0)) throw std::invalid_argument("somp: pi_th must be > 0");
    if (t_max < 1) throw std::invalid_argument("somp: T_max must be >= 1");
    if (meas.r_ts.rows() != dict.G) throw std::invalid_argument("somp: measurement rows must equal G");

    SompResult out;
    out.threshold = static_cast<double>(meas.r_ts.cols()) * dict.G * pi_th;
    ComplexMatrix residual = meas.r_ts;
    out.initial_residual_sq = residual.squaredNorm();
    double res_sq = out.initial_residual_sq;
    std::vector<char> used(dict.psi.cols(), 0);
    const int cap = std::min<int>(dict.G, static_cast<int>(dict.psi.cols()));
    const RealVector norms = dict.psi.colwise().norm().transpose();

    ComplexMatrix q_sel(dict.G, 0);  // orthonormal basis of the selected atoms
    const double eig_floor = static_cast<double>(meas.r_ts.cols()) * pi_th;

    while (res_sq >= out.threshold && static_cast<int>(out.support.size()) < std::min(t_max, cap)) {
        ComplexMatrix corr;
        RealVector denom = norms;
        bool rank_step = false;
        if (rule == SompRule::RankAware) {
            const auto evd = numerics::herm_evd(residual * residual.adjoint());
            const Eigen::Index n = evd.eigenvalues.size();
            const double floor = std::max(eig_floor, 1e-10 * evd.eigenvalues(n - 1));
            Eigen::Index r = 0;
            while (r < n && evd.eigenvalues(n - 1 - r) > floor) ++r;
            // a subspace filling the whole complement carries no support information
            rank_step = r > 0 && r < dict.G - static_cast<Eigen::Index>(out.support.size());
            if (rank_step) {
                corr = dict.psi.adjoint() * evd.eigenvectors.rightCols(r);
                if (q_sel.cols() > 0) {
                    const ComplexMatrix proj = q_sel.adjoint() * dict.psi;
                    denom = (norms.array().square() - proj.colwise().squaredNorm().transpose().array())
                                .cwiseMax(0.0)
                                .sqrt();
                }
            }
        }
        if (!rank_step) corr = dict.psi.adjoint() * residual;
        int best = -1;
        double best_val = -1.0;
        for (Eigen::Index a = 0; a < corr.rows(); ++a) {
            if (used[a] || norms(a) == 0.0 || denom(a) <= 1e-12 * norms(a)) continue;
            const double v = rank_step ? corr.row(a).norm() / denom(a) : corr.row(a).cwiseAbs().sum() / denom(a);
            if (v > best_val) {
                best_val = v;
                best = static_cast<int>(a);
            }
        }
        if (best < 0) break;
        used[best] = 1;
        out.support.push_back(best);

        ComplexMatrix sub(dict.G, static_cast<Eigen::Index>(out.support.size()));
        for (std::size_t j = 0; j < out.support.size(); ++j) sub.col(j) = dict.psi.col(out.support[j]);
        out.coefficients = numerics::pinv(sub) * meas.r_ts;
        if (rule == SompRule::RankAware) q_sel = Eigen::HouseholderQR<ComplexMatrix>(sub).householderQ() *
                                                 ComplexMatrix::Identity(dict.G, sub.cols());
        residual = meas.r_ts - sub * out.coefficients;
        res_sq = residual.squaredNorm();
        out.trace.push_back({best, res_sq});
    }
    if (out.support.empty()) out.coefficients.resize(0, meas.r_ts.cols());
    out.hit_max_iter = res_sq >= out.threshold;
    return out;
}

/// Line-oriented dump: a header, one line per iteration, a summary line.
inline void write_somp_dump(std::ostream& os, const SompResult& r, const SensingMatrix& dict) {
    os << "# somp initial_residual_sq=" << r.initial_residual_sq << " threshold=" << r.threshold << '\n';
    for (std::size_t t = 0; t < r.trace.size(); ++t) {
        const auto& it = r.trace[t];
        os << "iter " << t + 1 << " atom " << it.selected << " terminal " << dict.terminal_of(it.selected) << " tap "
           << dict.tap_of(it.selected) << " residual_sq " << it.residual_sq << '\n';
    }
    os << "done iterations " << r.trace.size() << " hit_max_iter " << (r.hit_max_iter ? 1 : 0) << '\n';
}

/// Stage-1 output in ascending support order.
struct CoarseEstimate {
    std::vector<int> support;
    ComplexMatrix coefficients;            // |support| x P(N+1)
    std::vector<std::vector<int>> omega;   // per terminal, rows into `support`
    std::vector<double> energy;            // per terminal mean energy
    std::vector<bool> active;
    std::vector<int> ats;
    int iterations = 0;
    bool hit_max_iter = false;
};

inline CoarseEstimate make_coarse(std::vector<int> support_in, const ComplexMatrix& coeffs, const SensingMatrix& dict) {
    std::vector<std::size_t> order(support_in.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return support_in[a] < support_in[b]; });
    CoarseEstimate c;
    c.coefficients.resize(static_cast<Eigen::Index>(order.size()), coeffs.cols());
    for (std::size_t j = 0; j < order.size(); ++j) {
        c.support.push_back(support_in[order[j]]);
        c.coefficients.row(j) = coeffs.row(order[j]);
    }
    c.omega.assign(dict.K, {});
    for (std::size_t j = 0; j < c.support.size(); ++j) c.omega[dict.terminal_of(c.support[j])].push_back(static_cast<int>(j));
    c.energy.assign(dict.K, 0.0);
    c.active.assign(dict.K, false);
    return c;
}

/// alpha_k = 1 iff energy_k >= beta * max energy (and energy_k > 0);
/// energy_k = sum over Omega_k rows of |H|^2 / (P (N+1)).
inline void identify_active(CoarseEstimate& c, double beta) {
    if (!(beta > 0.0) || beta > 1.0) throw std::invalid_argument("identify_active: beta must lie in (0, 1]");
    const double cols = std::max<double>(1.0, static_cast<double>(c.coefficients.cols()));
    double emax = 0.0;
    for (std::size_t k = 0; k < c.omega.size(); ++k) {
        double e = 0.0;
        for (int row : c.omega[k]) e += c.coefficients.row(row).squaredNorm();
        c.energy[k] = e / cols;
        emax = std::max(emax, c.energy[k]);
    }
    c.ats.clear();
    for (std::size_t k = 0; k < c.omega.size(); ++k) {
        c.active[k] = c.energy[k] > 0.0 && c.energy[k] >= beta * emax;
        if (c.active[k]) c.ats.push_back(static_cast<int>(k));
    }
}

/// Delay taps of terminal k read off its support entries.
inline std::vector<int> estimate_delays(const CoarseEstimate& c, int k, int L) {
    std::vector<int> taps;
    for (int row : c.omega.at(k)) taps.push_back(c.support[row] - k * L);
    return taps;
}

inline CoarseEstimate coarse_from_somp(const SompResult& r, const SensingMatrix& dict, double beta) {
    CoarseEstimate c = make_coarse(r.support, r.coefficients, dict);
    c.iterations = static_cast<int>(r.trace.size());
    c.hit_max_iter = r.hit_max_iter;
    identify_active(c, beta);
    return c;
}

/// Genie LS on a known support with known activity.
inline CoarseEstimate oracle_ls(const MmvMeasurement& meas, const std::vector<int>& true_support,
                                const std::vector<bool>& true_active, const SensingMatrix& dict) {
    ComplexMatrix coeffs(static_cast<Eigen::Index>(true_support.size()), meas.r_ts.cols());
    if (!true_support.empty()) {
        ComplexMatrix sub(dict.G, static_cast<Eigen::Index>(true_support.size()));
        for (std::size_t j = 0; j < true_support.size(); ++j) sub.col(j) = dict.psi.col(true_support[j]);
        coeffs = numerics::pinv(sub) * meas.r_ts;
    }
    CoarseEstimate c = make_coarse(true_support, coeffs, dict);
    for (std::size_t k = 0; k < c.omega.size(); ++k) {
        double e = 0.0;
        for (int row : c.omega[k]) e += c.coefficients.row(row).squaredNorm();
        c.energy[k] = e / std::max<double>(1.0, static_cast<double>(coeffs.cols()));
    }
    c.active = true_active;
    c.active.resize(dict.K, false);
    for (int k = 0; k < dict.K; ++k)
        if (c.active[k]) c.ats.push_back(k);
    return c;
}

// ---------------------------------------------------------------------------
// Stage 2: ESPRIT Doppler and effective gains
// ---------------------------------------------------------------------------

struct DopplerEstimate {
    double nu = 0.0;
    bool low_confidence = false;
};

/// Rotational-invariance Doppler from an (N+1) x P slot-by-antenna matrix.
inline DopplerEstimate esprit_doppler(const ComplexMatrix& h, int N) {
    if (N < 2) throw std::invalid_argument("esprit_doppler: N must be >= 2");
    if (h.rows() != N + 1 || h.cols() < 1) throw std::invalid_argument("esprit_doppler: expected (N+1) x P input");
    const Eigen::Index p_count = h.cols();
    ComplexMatrix x(2 * N, p_count);
    x.topRows(N) = h.topRows(N);
    x.bottomRows(N) = h.bottomRows(N);
    ComplexMatrix r = x * x.adjoint() / static_cast<double>(p_count);
    if (r.trace().real() <= 0.0 || !numerics::all_finite(r)) return {0.0, true};
    r = 0.5 * (r + r.adjoint()).eval();
    auto evd = numerics::herm_evd(r);
    // noise floor removal; leaves eigenvectors unchanged
    const double floor = evd.eigenvalues(0);
    RealVector lam = (evd.eigenvalues.array() - floor).cwiseMax(0.0);
    if (lam.maxCoeff() <= 0.0) return {0.0, true};
    const ComplexVector e = evd.eigenvectors.col(2 * N - 1);
    const cd rot = e.head(N).dot(e.tail(N));  // e1^H e2
    if (std::abs(rot) == 0.0) return {0.0, true};
    double nu = static_cast<double>(N) / (2.0 * kPi) * std::arg(rot);
    if (nu <= -N / 2.0) nu += N;
    return {nu, false};
}

struct GainEstimate {
    ComplexMatrix gains;  // Q x P
    ComplexMatrix z;      // Q x P(N+1), A^{-1} h^i per slot
    double condition = 1.0;
    bool regularized = false;
};

inline constexpr double kGainConditionLimit = 1e8;

/// Gain recovery: A = pinv(Psi_J) Gamma, z^i = A^{-1} h^i, g = mean_i z^i / eta^i.
/// `h_rows` is |J| x P(N+1); `nu` holds the Doppler of each atom in J.
inline GainEstimate estimate_gains(const ComplexMatrix& h_rows, const std::vector<int>& support,
                                   const std::vector<double>& nu, const SensingMatrix& dict, const SystemConfig& cfg) {
    const Eigen::Index q = static_cast<Eigen::Index>(support.size());
    if (nu.size() != support.size() || h_rows.rows() != q)
        throw std::invalid_argument("estimate_gains: support, Doppler and coefficient rows must agree");
    const int slots = cfg.N + 1;
    const int pa = static_cast<int>(h_rows.cols()) / slots;
    if (pa * slots != h_rows.cols()) throw std::invalid_argument("estimate_gains: column count must be P(N+1)");
    GainEstimate out;
    out.gains = ComplexMatrix::Zero(q, pa);
    out.z = ComplexMatrix::Zero(q, h_rows.cols());
    if (q == 0) return out;

    const double d = cfg.doppler_phase_denominator();
    ComplexMatrix psi_j(dict.G, q), gamma(dict.G, q);
    for (Eigen::Index j = 0; j < q; ++j) {
        psi_j.col(j) = dict.psi.col(support[j]);
        for (int g = 0; g < dict.G; ++g)
            gamma(g, j) = numerics::cis(2.0 * kPi * nu[j] * g / d) * dict.psi(g, support[j]);
    }
    const ComplexMatrix a = numerics::pinv(psi_j) * gamma;
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    const auto& sv = svd.singularValues();
    out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    ComplexMatrix a_inv;
    if (out.condition > kGainConditionLimit) {
        const ComplexMatrix aha = a.adjoint() * a;
        const double lambda = 1e-8 * aha.trace().real() / static_cast<double>(q);
        a_inv = (aha + lambda * ComplexMatrix::Identity(q, q)).partialPivLu().solve(a.adjoint());
        out.regularized = true;
    } else {
        a_inv = a.partialPivLu().inverse();
    }
    out.z = a_inv * h_rows;
    for (Eigen::Index j = 0; j < q; ++j) {
        const int l = dict.tap_of(support[j]);
        for (int i = 0; i < slots; ++i) {
            const cd eta = numerics::cis(2.0 * kPi * nu[j] * (static_cast<double>(i) / cfg.N + (cfg.L - 1 - l) / d));
            for (int p = 0; p < pa; ++p) out.gains(j, p) += out.z(j, static_cast<Eigen::Index>(i) * pa + p) / eta;
        }
    }
    out.gains /= static_cast<double>(slots);
    return out;
}

struct RefinedTerminal {
    int terminal = 0;
    std::vector<int> delays;
    double doppler = 0.0;
    ComplexMatrix gains;  // |delays| x P
    bool low_confidence = false;
};

struct RefinedChannel {
    std::vector<RefinedTerminal> terminals;
    double condition = 1.0;
    bool regularized = false;
    int doppler_passes = 0;
};

namespace detail {

inline Eigen::Index strongest_row(const ComplexMatrix& rows, const std::vector<Eigen::Index>& candidates) {
    Eigen::Index best = candidates.front();
    double e = -1.0;
    for (auto r : candidates) {
        const double v = rows.row(r).squaredNorm();
        if (v > e) {
            e = v;
            best = r;
        }
    }
    return best;
}

}  // namespace detail

/// Stage 2 over the ATS. The coefficients are recomputed on the ATS support,
/// one Doppler is estimated per terminal from its strongest tap, then gains
/// follow. Each extra pass re-runs the Doppler estimate on the decoupled
/// rows z (passes stop early once the Doppler update falls below 1e-12).
inline RefinedChannel refine(const MmvMeasurement& meas, const SensingMatrix& dict, const CoarseEstimate& coarse,
                             const SystemConfig& cfg) {
    RefinedChannel out;
    std::vector<int> support;
    std::vector<std::vector<Eigen::Index>> rows_of;  // per ATS terminal, rows into `support`
    for (int k : coarse.ats) {
        std::vector<Eigen::Index> rows;
        for (int row : coarse.omega.at(k)) {
            rows.push_back(static_cast<Eigen::Index>(support.size()));
            support.push_back(coarse.support[row]);
        }
        rows_of.push_back(std::move(rows));
    }
    if (support.empty()) return out;

    ComplexMatrix psi_j(dict.G, static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) psi_j.col(j) = dict.psi.col(support[j]);
    const ComplexMatrix h2 = numerics::pinv(psi_j) * meas.r_ts;

    std::vector<double> nu_term(coarse.ats.size(), 0.0);
    std::vector<bool> low(coarse.ats.size(), false);
    for (std::size_t t = 0; t < coarse.ats.size(); ++t) {
        const auto d = esprit_doppler(meas.slot_by_antenna(h2, detail::strongest_row(h2, rows_of[t])), cfg.N);
        nu_term[t] = d.nu;
        low[t] = d.low_confidence;
    }
    auto per_atom = [&]() {
        std::vector<double> nu(support.size());
        for (std::size_t t = 0; t < rows_of.size(); ++t)
            for (auto r : rows_of[t]) nu[r] = nu_term[t];
        return nu;
    };
    GainEstimate ge = estimate_gains(h2, support, per_atom(), dict, cfg);
    for (int pass = 0; pass < cfg.doppler_refine_passes; ++pass) {
        double change = 0.0;
        for (std::size_t t = 0; t < coarse.ats.size(); ++t) {
            if (low[t]) continue;
            const auto d = esprit_doppler(meas.slot_by_antenna(ge.z, detail::strongest_row(ge.z, rows_of[t])), cfg.N);
            if (d.low_confidence) continue;
            change = std::max(change, std::abs(d.nu - nu_term[t]));
            nu_term[t] = d.nu;
        }
        ge = estimate_gains(h2, support, per_atom(), dict, cfg);
        out.doppler_passes = pass + 1;
        if (change < 1e-12) break;
    }

    out.condition = ge.condition;
    out.regularized = ge.regularized;
    for (std::size_t t = 0; t < coarse.ats.size(); ++t) {
        RefinedTerminal rt;
        rt.terminal = coarse.ats[t];
        rt.doppler = nu_term[t];
        rt.low_confidence = low[t];
        rt.gains.resize(static_cast<Eigen::Index>(rows_of[t].size()), ge.gains.cols());
        for (std::size_t q = 0; q < rows_of[t].size(); ++q) {
            rt.delays.push_back(dict.tap_of(support[rows_of[t][q]]));
            rt.gains.row(q) = ge.gains.row(rows_of[t][q]);
        }
        out.terminals.push_back(std::move(rt));
    }
    return out;
}

/// Refined parameters as channel realizations (DD taps: delay, Doppler, gain).
inline std::vector<channel::ChannelRealization> reconstruct_cir(const RefinedChannel& refined) {
    std::vector<channel::ChannelRealization> out;
    for (const auto& t : refined.terminals) {
        channel::ChannelRealization ch;
        ch.terminal = t.terminal;
        for (std::size_t q = 0; q < t.delays.size(); ++q)
            ch.paths.push_back({t.delays[q], t.doppler, t.gains.row(q).transpose()});
        out.push_back(std::move(ch));
    }
    return out;
}

/// Doppler-ignored CIR from stage 1: coefficient of the nearest TS slot.
inline ComplexVector coarse_cir(const CoarseEstimate& c, const MmvMeasurement& meas, int k, long kappa, int ell,
                                const SensingMatrix& dict, const SystemConfig& cfg) {
    ComplexVector h = ComplexVector::Zero(meas.antennas);
    const double centre = static_cast<double>(kappa) - (cfg.L - 1 + (cfg.G() - 1) / 2.0);
    int slot = static_cast<int>(std::lround(centre / cfg.block_len()));
    slot = std::clamp(slot, 0, cfg.N);
    for (int row : c.omega.at(k)) {
        if (dict.tap_of(c.support[row]) != ell) continue;
        for (int p = 0; p < meas.antennas; ++p)
            h(p) += c.coefficients(row, static_cast<Eigen::Index>(slot) * meas.antennas + p);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Two-stage receiver
// ---------------------------------------------------------------------------

struct AccessResult {
    SompResult somp;
    CoarseEstimate coarse;
    RefinedChannel refined;
};

inline double somp_threshold(double noise_variance, const SystemConfig& cfg) {
    return noise_variance > 0.0 ? cfg.somp_threshold_factor * noise_variance : cfg.somp_noiseless_floor;
}

inline AccessResult run_access(const MmvMeasurement& meas, const SensingMatrix& dict, double noise_variance,
                               const SystemConfig& cfg) {
    AccessResult r;
    r.somp = somp(meas, dict, cfg.somp_max_iter, somp_threshold(noise_variance, cfg),
                  cfg.somp_rank_aware ? SompRule::RankAware : SompRule::Correlation);
    r.coarse = coarse_from_somp(r.somp, dict, cfg.activity_beta);
    r.refined = refine(meas, dict, r.coarse, cfg);
    return r;
}

}  // namespace tsotfs::access
