// SPDX-License-Identifier: Apache-2.0
//
// cfmimo - link-level simulation toolkit for cell-free massive MIMO
// Copyright (C) 2026 The cfmimo authors
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

#ifndef CFMIMO_LEMMAS_HPP
#define CFMIMO_LEMMAS_HPP

#include <cmath>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

// Statistical oracle outcome. The statistic is compared against its analytic
// target with a tolerance expressed in multiples of the empirical standard
// error; a tiny relative floor keeps deterministic cases from tripping on
// floating-point summation noise.
struct LemmaCheckResult {
    double statistic = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    long trials = 0;
};

namespace detail {

class MeanAccumulator {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    double mean() const { return mean_; }
    double stderr_of_mean() const {
        if (n_ < 2) return 0.0;
        return std::sqrt(m2_ / (n_ - 1) / n_);
    }
    long count() const { return n_; }

  private:
    long n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

inline LemmaCheckResult finish(const MeanAccumulator& acc, double target, double stderr_mult) {
    LemmaCheckResult r;
    r.statistic = acc.mean();
    r.target = target;
    r.tolerance = std::max(stderr_mult * acc.stderr_of_mean(), 1e-12 * (std::abs(target) + 1.0));
    r.passed = std::abs(r.statistic - r.target) <= r.tolerance;
    r.trials = acc.count();
    return r;
}

}  // namespace detail

// E{x^H A x} = tr(A)/M for x ~ CN(0, I/M)
inline LemmaCheckResult check_trace_lemma(int M, const MatrixXcd& A, long trials,
                                          std::uint64_t seed, double stderr_mult = 5.0) {
    require(A.rows() == M && A.cols() == M, "check_trace_lemma: A must be M x M");
    Rng rng(derive_seed(seed, 0x71, 0));
    detail::MeanAccumulator acc;
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (long t = 0; t < trials; ++t) {
        VectorXcd x = scale * rng.cgauss_vector(M);
        acc.add((x.adjoint() * A * x)(0).real());
    }
    return detail::finish(acc, A.trace().real() / M, stderr_mult);
}

// E{x^H A w} = 0 for independent x, w ~ CN(0, I/M)
inline LemmaCheckResult check_trace_lemma_cross(int M, const MatrixXcd& A, long trials,
                                                std::uint64_t seed, double stderr_mult = 5.0) {
    require(A.rows() == M && A.cols() == M, "check_trace_lemma_cross: A must be M x M");
    Rng rng(derive_seed(seed, 0x72, 0));
    detail::MeanAccumulator acc;
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (long t = 0; t < trials; ++t) {
        VectorXcd x = scale * rng.cgauss_vector(M);
        VectorXcd w = scale * rng.cgauss_vector(M);
        acc.add((x.adjoint() * A * w)(0).real());
    }
    return detail::finish(acc, 0.0, stderr_mult);
}

// E{tr(X^-1)} = K/(N-K) for a K x K central Wishart X with N degrees of freedom
inline LemmaCheckResult check_wishart_inverse_trace(int K, int N, long trials,
                                                    std::uint64_t seed, double stderr_mult = 5.0) {
    require(N > K, "check_wishart_inverse_trace: requires N > K (finite expectation)");
    Rng rng(derive_seed(seed, 0x73, 0));
    detail::MeanAccumulator acc;
    for (long t = 0; t < trials; ++t) {
        MatrixXcd Z = rng.cgauss_matrix(K, N);
        MatrixXcd X = Z * Z.adjoint();
        acc.add(X.inverse().trace().real());
    }
    return detail::finish(acc, static_cast<double>(K) / (N - K), stderr_mult);
}

// E{u^H B u} = mu^H B mu + tr(B Sigma) for u with mean mu and covariance Sigma
inline LemmaCheckResult check_quadratic_form_mean(const VectorXcd& mu, const MatrixXcd& Sigma,
                                                  const MatrixXcd& B, long trials,
                                                  std::uint64_t seed, double stderr_mult = 5.0) {
    const int n = static_cast<int>(mu.size());
    require(Sigma.rows() == n && B.rows() == n, "check_quadratic_form_mean: shape mismatch");
    Rng rng(derive_seed(seed, 0x74, 0));
    MatrixXcd SL = psd_sqrt(Sigma);
    detail::MeanAccumulator acc;
    for (long t = 0; t < trials; ++t) {
        VectorXcd u = mu + SL * rng.cgauss_vector(n);
        acc.add((u.adjoint() * B * u)(0).real());
    }
    const double target = (mu.adjoint() * B * mu)(0).real() + (B * Sigma).trace().real();
    return detail::finish(acc, target, stderr_mult);
}

// E{|u^H B u|^2} = |tr(Sigma B)|^2 + tr(Sigma B Sigma B^H) for zero-mean u
inline LemmaCheckResult check_quadratic_form_second_moment(const MatrixXcd& Sigma,
                                                           const MatrixXcd& B, long trials,
                                                           std::uint64_t seed,
                                                           double stderr_mult = 5.0) {
    const int n = static_cast<int>(Sigma.rows());
    require(B.rows() == n && B.cols() == n, "check_quadratic_form_second_moment: shape mismatch");
    Rng rng(derive_seed(seed, 0x75, 0));
    MatrixXcd SL = psd_sqrt(Sigma);
    detail::MeanAccumulator acc;
    for (long t = 0; t < trials; ++t) {
        VectorXcd u = SL * rng.cgauss_vector(n);
        acc.add(std::norm((u.adjoint() * B * u)(0)));
    }
    const double target =
        std::norm((Sigma * B).trace()) + (Sigma * B * Sigma * B.adjoint()).trace().real();
    return detail::finish(acc, target, stderr_mult);
}

// E{I - R^H (R R^H)^-1 R} = ((M-N)/M) I_M for R with iid CN(0,1) entries.
// The statistic is the max-abs entrywise deviation of the sample mean,
// asserted against an absolute tolerance.
inline LemmaCheckResult check_projection_expectation(int M, int N, long trials,
                                                     std::uint64_t seed,
                                                     double abs_tolerance = 0.01) {
    require(M > N, "check_projection_expectation: requires M > N");
    Rng rng(derive_seed(seed, 0x76, 0));
    MatrixXcd mean = MatrixXcd::Zero(M, M);
    for (long t = 0; t < trials; ++t) {
        MatrixXcd R = rng.cgauss_matrix(N, M);
        MatrixXcd B = MatrixXcd::Identity(M, M) -
                      R.adjoint() * (R * R.adjoint()).llt().solve(R);
        mean += B;
    }
    mean /= static_cast<double>(trials);
    const double frac = static_cast<double>(M - N) / M;
    LemmaCheckResult r;
    r.statistic = (mean - frac * MatrixXcd::Identity(M, M)).cwiseAbs().maxCoeff();
    r.target = 0.0;
    r.tolerance = abs_tolerance;
    r.passed = r.statistic <= r.tolerance;
    r.trials = trials;
    return r;
}

// E{x^H M x  x^H N x} = tr(Rb M Rb N) + tr(Rb M) tr(Rb N) for x ~ CN(0, Rb)
inline LemmaCheckResult check_double_quadratic(const MatrixXcd& Rbar, const MatrixXcd& Mmat,
                                               const MatrixXcd& Nmat, long trials,
                                               std::uint64_t seed, double stderr_mult = 5.0) {
    const int n = static_cast<int>(Rbar.rows());
    require(Mmat.rows() == n && Nmat.rows() == n, "check_double_quadratic: shape mismatch");
    Rng rng(derive_seed(seed, 0x77, 0));
    MatrixXcd RL = psd_sqrt(Rbar);
    detail::MeanAccumulator acc;
    for (long t = 0; t < trials; ++t) {
        VectorXcd x = RL * rng.cgauss_vector(n);
        acc.add(((x.adjoint() * Mmat * x)(0) * (x.adjoint() * Nmat * x)(0)).real());
    }
    const double target =
        (Rbar * Mmat * Rbar * Nmat).trace().real() +
        ((Rbar * Mmat).trace() * (Rbar * Nmat).trace()).real();
    return detail::finish(acc, target, stderr_mult);
}

}  // namespace cfmimo

#endif
