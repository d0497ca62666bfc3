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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsotfs {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cd kJ{0.0, 1.0};

namespace numerics {

// e^{j*phase}
inline cd cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

inline bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const cd v = a.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

// Checked construction: rejects empty shapes and non-finite entries.
inline ComplexMatrix make_matrix(Eigen::Index rows, Eigen::Index cols, const std::vector<cd>& col_major) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ComplexMatrix: rows and cols must be >= 1");
    if (static_cast<Eigen::Index>(col_major.size()) != rows * cols)
        throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
    ComplexMatrix m = Eigen::Map<const ComplexMatrix>(col_major.data(), rows, cols);
    if (!all_finite(m)) throw std::invalid_argument("ComplexMatrix: non-finite entry");
    return m;
}

/// n x n DFT matrix with unitary scaling, F[a,b] = e^{-j 2 pi a b / n} / sqrt(n).
inline ComplexMatrix unitary_dft(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("unitary_dft: n must be >= 1");
    ComplexMatrix f(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            // reduce a*b mod n first so large grids keep full phase precision
            const auto ab = static_cast<double>((a * b) % n);
            f(a, b) = scale * cis(-2.0 * kPi * ab / static_cast<double>(n));
        }
    return f;
}

struct PinvResult {
    ComplexMatrix pinv;
    Eigen::Index rank = 0;
    bool rank_deficient = false;
};

/// Moore-Penrose pseudo-inverse through a full SVD. Singular values below
/// 1e-12 * sigma_max are truncated and reported as rank deficiency.
inline PinvResult pinv_checked(const ComplexMatrix& a) {
    if (a.size() == 0) throw std::invalid_argument("pinv: empty matrix");
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double cut = 1e-12 * smax;
    PinvResult out;
    RealVector inv = RealVector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cut && s(i) > 0.0) {
            inv(i) = 1.0 / s(i);
            ++out.rank;
        }
    }
    out.rank_deficient = out.rank < std::min(a.rows(), a.cols());
    out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    return out;
}

inline ComplexMatrix pinv(const ComplexMatrix& a) { return pinv_checked(a).pinv; }

struct HermitianEvd {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // columns, orthonormal
};

/// Eigendecomposition of a Hermitian matrix. Throws on non-square or
/// non-Hermitian input (tolerance 1e-10 relative to the largest entry).
inline HermitianEvd herm_evd(const ComplexMatrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("herm_evd: matrix must be square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("herm_evd: matrix is not Hermitian");
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    if (es.info() != Eigen::Success) throw std::runtime_error("herm_evd: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Matrix-free linear map C^in_dim -> C^out_dim with its adjoint.
struct LinearOperator {
    Eigen::Index in_dim = 0;
    Eigen::Index out_dim = 0;
    std::function<ComplexVector(const ComplexVector&)> forward;
    std::function<ComplexVector(const ComplexVector&)> adjoint;

    ComplexVector apply(const ComplexVector& x) const { return forward(x); }
    ComplexVector apply_adjoint(const ComplexVector& y) const { return adjoint(y); }

    static LinearOperator from_matrix(ComplexMatrix a) {
        LinearOperator op;
        op.in_dim = a.cols();
        op.out_dim = a.rows();
        auto shared = std::make_shared<const ComplexMatrix>(std::move(a));
        op.forward = [shared](const ComplexVector& x) -> ComplexVector { return (*shared) * x; };
        op.adjoint = [shared](const ComplexVector& y) -> ComplexVector { return shared->adjoint() * y; };
        return op;
    }
};

/// Deterministic random stream keyed by (seed, stream id).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_(stream_id), engine_(mix(seed, stream_id)) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }
    std::mt19937_64& engine() { return engine_; }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    // inclusive range
    long uniform_int(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }
    std::uint64_t next_u64() { return engine_(); }

    // SplitMix64 finalizer over the pair, so nearby ids give unrelated streams.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id) {
        auto step = [](std::uint64_t z) {
            z += 0x9E3779B97F4A7C15ULL;
            z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31U);
        };
        return step(step(seed) ^ (stream_id * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// n i.i.d. CN(0, variance) samples: real and imaginary parts each N(0, variance/2).
inline ComplexVector complex_gaussian(RngStream& rng, Eigen::Index n, double variance) {
    if (variance < 0.0) throw std::invalid_argument("complex_gaussian: variance must be >= 0");
    ComplexVector v(n);
    const double sd = std::sqrt(variance / 2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        v(i) = cd(sd * re, sd * im);
    }
    return v;
}

/// Largest relative mismatch |<Ax,y> - <x,A^H y>| / (|Ax||y|) over random probes.
inline double adjoint_mismatch(const LinearOperator& op, RngStream& rng, int trials = 10) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ComplexVector x = complex_gaussian(rng, op.in_dim, 1.0);
        const ComplexVector y = complex_gaussian(rng, op.out_dim, 1.0);
        const ComplexVector ax = op.apply(x);
        const ComplexVector ahy = op.apply_adjoint(y);
        const cd lhs = ax.dot(y);   // conj(ax)^T y
        const cd rhs = x.dot(ahy);  // conj(x)^T A^H y
        const double denom = std::max(ax.norm() * y.norm(), 1e-300);
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    return worst;
}

struct LsqrResult {
    ComplexVector x;
    int iterations = 0;
    bool converged = false;
    double residual_norm = 0.0;
};

inline constexpr double kLsqrDefaultTol = 1e-8;
inline constexpr int kLsqrDefaultMaxIter = 200;

/// LSQR (Paige & Saunders) for min ||A x - b||_2 over complex vectors.
/// Stops when ||r|| <= tol ||b|| or ||A^H r|| <= tol ||A|| ||r||.
inline LsqrResult lsqr_solve(const LinearOperator& op, const ComplexVector& b,
                             double tol = kLsqrDefaultTol, int max_iter = kLsqrDefaultMaxIter) {
    if (op.out_dim != b.size()) throw std::invalid_argument("lsqr_solve: rhs length does not match operator");
    if (!(tol > 0.0)) throw std::invalid_argument("lsqr_solve: tol must be > 0");
    LsqrResult res;
    res.x = ComplexVector::Zero(op.in_dim);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }

    ComplexVector u = b;
    double beta = bnorm;
    u /= beta;
    ComplexVector v = op.apply_adjoint(u);
    double alpha = v.norm();
    if (alpha == 0.0) {
        // b is orthogonal to range(A); x = 0 is optimal
        res.converged = true;
        res.residual_norm = bnorm;
        return res;
    }
    v /= alpha;
    ComplexVector w = v;
    double phibar = beta;
    double rhobar = alpha;
    double anorm2 = 0.0;

    for (int it = 1; it <= max_iter; ++it) {
        u = op.apply(v) - alpha * u;
        beta = u.norm();
        if (beta > 0.0) {
            u /= beta;
            anorm2 += alpha * alpha + beta * beta;
            v = op.apply_adjoint(u) - beta * v;
            alpha = v.norm();
            if (alpha > 0.0) v /= alpha;
        } else {
            anorm2 += alpha * alpha;
        }

        const double rho = std::hypot(rhobar, beta);
        const double c = rhobar / rho;
        const double s = beta / rho;
        const double theta = s * alpha;
        rhobar = -c * alpha;
        const double phi = c * phibar;
        phibar = s * phibar;

        res.x += (phi / rho) * w;
        w = v - (theta / rho) * w;
        res.iterations = it;

        const double rnorm = phibar;
        const double arnorm = phibar * alpha * std::abs(c);
        const double anorm = std::sqrt(anorm2);
        if (rnorm <= tol * bnorm || arnorm <= tol * anorm * rnorm || alpha == 0.0 || beta == 0.0) {
            res.converged = true;
            break;
        }
    }
    res.residual_norm = (op.apply(res.x) - b).norm();
    return res;
}

inline double db10(double linear) { return 10.0 * std::log10(linear); }
inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace numerics
}  // namespace tsotfs
