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

#ifndef CFMIMO_DLINK_HPP
#define CFMIMO_DLINK_HPP

#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cfmimo/training.hpp"

namespace cfmimo {

enum class PrecoderScheme { CB, NCB, ECB, FZF, PZF, PPZF, CZF };

inline const char* to_string(PrecoderScheme s) {
    switch (s) {
        case PrecoderScheme::CB: return "CB";
        case PrecoderScheme::NCB: return "NCB";
        case PrecoderScheme::ECB: return "ECB";
        case PrecoderScheme::FZF: return "FZF";
        case PrecoderScheme::PZF: return "PZF";
        case PrecoderScheme::PPZF: return "PPZF";
        case PrecoderScheme::CZF: return "CZF";
    }
    return "?";
}

// Per-AP strong/weak UE split used by PZF and PPZF. Strong sets hold UE
// indices; every UE not listed is weak at that AP.
struct PrecoderGroups {
    std::vector<std::vector<int>> strong;
};

// LSF-based grouping: at each AP, the UEs jointly capturing `fraction` of the
// total beta mass (largest first) are strong. max_strong caps the group so
// ZF-style precoders keep spare dimensions (pass N - 1).
inline PrecoderGroups group_by_largescale(const MatrixXd& beta, double fraction = 0.95,
                                          int max_strong = -1) {
    const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
    PrecoderGroups g;
    g.strong.resize(M);
    for (int m = 0; m < M; ++m) {
        std::vector<int> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return beta(m, a) > beta(m, b); });
        const double total = beta.row(m).sum();
        double acc = 0.0;
        for (int k : order) {
            if (acc >= fraction * total && !g.strong[m].empty()) break;
            if (max_strong >= 0 && static_cast<int>(g.strong[m].size()) >= max_strong) break;
            g.strong[m].push_back(k);
            acc += beta(m, k);
        }
        std::sort(g.strong[m].begin(), g.strong[m].end());
    }
    return g;
}

// Beamforming vectors for one channel/estimate realization, stored so the
// effective downlink gain pairs as h^H w (the mirrored convention conjugates
// both the precoder and the gain; every statistic is identical). norm_sq
// holds the analytic E{||w||^2} used by the per-AP power constraint:
//   CB:  w = hhat, norm_sq = tr(est_cov) (= N gamma uncorrelated)
//   NCB: unit norm per draw
//   ECB: w = hhat/||hhat||^2, norm_sq = 1/((N-1) gamma) uncorrelated
//   FZF/PZF/PPZF: scaled to unit expected square norm
//   CZF: raw pseudo-inverse columns, norm_sq must be sample-estimated
struct PrecoderSet {
    PrecoderScheme scheme = PrecoderScheme::CB;
    std::vector<MatrixXcd> w;  // per AP: N x K
    MatrixXd norm_sq;          // M x K
    std::vector<std::vector<int>> strong;
    bool ridge_applied = false;
};

namespace detail {

// pseudo-inverse basis B (B^H B)^-1 so that columns null the other basis
// directions under the h^H w pairing; adds a tiny ridge if the Gram matrix
// degenerates numerically
inline MatrixXcd zf_base(const MatrixXcd& B, bool* ridge_flag) {
    MatrixXcd G = B.adjoint() * B;
    Eigen::LLT<MatrixXcd> llt(G);
    if (llt.info() != Eigen::Success) {
        const double ridge = 1e-12 * std::max(G.trace().real(), 1.0);
        G += ridge * MatrixXcd::Identity(G.rows(), G.cols());
        llt.compute(G);
        if (ridge_flag) *ridge_flag = true;
        if (llt.info() != Eigen::Success)
            throw numerical_domain_error("zf_base: Gram matrix not positive definite");
    }
    return B * llt.solve(MatrixXcd::Identity(G.rows(), G.cols()));
}

inline std::vector<int> unique_pilots(const std::vector<int>& ues, const PilotBook& pilots) {
    std::vector<int> p;
    for (int k : ues) p.push_back(pilots.assignment[k]);
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

}  // namespace detail

inline PrecoderSet build_precoder(PrecoderScheme scheme, const ChannelEstimate& est,
                                  const PilotBook& pilots,
                                  const PrecoderGroups* groups = nullptr) {
    const int M = est.num_aps(), K = est.num_ues(), N = est.antennas;
    PrecoderSet ps;
    ps.scheme = scheme;
    ps.w.assign(M, MatrixXcd::Zero(N, K));
    ps.norm_sq = MatrixXd::Zero(M, K);
    if (groups) ps.strong = groups->strong;

    switch (scheme) {
        case PrecoderScheme::CB:
            for (int m = 0; m < M; ++m) {
                ps.w[m] = est.hhat[m];
                for (int k = 0; k < K; ++k) ps.norm_sq(m, k) = N * est.gamma(m, k);
            }
            break;

        case PrecoderScheme::NCB:
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < K; ++k) {
                    const double n = est.hhat[m].col(k).norm();
                    if (n > 0.0) ps.w[m].col(k) = est.hhat[m].col(k) / n;
                    ps.norm_sq(m, k) = 1.0;
                }
            }
            break;

        case PrecoderScheme::ECB:
            require(N >= 2, "build_precoder: ECB requires N >= 2");
            for (int m = 0; m < M; ++m) {
                for (int k = 0; k < K; ++k) {
                    const double n2 = est.hhat[m].col(k).squaredNorm();
                    if (n2 > 0.0) ps.w[m].col(k) = est.hhat[m].col(k) / n2;
                    const double g = est.gamma(m, k);
                    ps.norm_sq(m, k) = g > 0.0 ? 1.0 / ((N - 1) * g) : 0.0;
                }
            }
            break;

        case PrecoderScheme::FZF: {
            if (N <= pilots.tau_up)
                throw invalid_configuration_error(
                    "build_precoder: FZF requires N > tau_up (all APs violate)");
            for (int m = 0; m < M; ++m) {
                MatrixXcd base = detail::zf_base(est.ybar[m], &ps.ridge_applied);
                for (int k = 0; k < K; ++k) {
                    const int p = pilots.assignment[k];
                    const double scale = std::sqrt(est.psi(m, p) * (N - pilots.tau_up));
                    ps.w[m].col(k) = scale * base.col(p);
                    ps.norm_sq(m, k) = 1.0;
                }
            }
            break;
        }

        case PrecoderScheme::PZF:
        case PrecoderScheme::PPZF: {
            require(groups != nullptr, "build_precoder: PZF/PPZF need strong/weak groups");
            for (int m = 0; m < M; ++m) {
                const auto& S = groups->strong[m];
                const std::vector<int> pil = detail::unique_pilots(S, pilots);
                const int tau_s = static_cast<int>(pil.size());
                if (N <= tau_s)
                    throw invalid_configuration_error(
                        "build_precoder: AP " + std::to_string(m) +
                        " has too few antennas for its strong group");
                std::vector<bool> is_strong(K, false);
                for (int k : S) is_strong[k] = true;

                MatrixXcd Bs(N, tau_s);
                for (int j = 0; j < tau_s; ++j) Bs.col(j) = est.ybar[m].col(pil[j]);
                MatrixXcd base = tau_s > 0 ? detail::zf_base(Bs, &ps.ridge_applied)
                                           : MatrixXcd::Zero(N, 0);
                MatrixXcd proj = MatrixXcd::Identity(N, N);
                if (scheme == PrecoderScheme::PPZF && tau_s > 0)
                    proj -= base * Bs.adjoint();

                for (int k = 0; k < K; ++k) {
                    if (is_strong[k]) {
                        const int p = pilots.assignment[k];
                        const int j = static_cast<int>(
                            std::lower_bound(pil.begin(), pil.end(), p) - pil.begin());
                        const double scale = std::sqrt(est.psi(m, p) * (N - tau_s));
                        ps.w[m].col(k) = scale * base.col(j);
                        ps.norm_sq(m, k) = 1.0;
                    } else if (scheme == PrecoderScheme::PZF) {
                        ps.w[m].col(k) = est.hhat[m].col(k);
                        ps.norm_sq(m, k) = N * est.gamma(m, k);
                    } else {
                        // protective MR: project out the strong-pilot subspace
                        const int p = pilots.assignment[k];
                        const bool shared =
                            std::binary_search(pil.begin(), pil.end(), p);
                        VectorXcd v = proj * est.hhat[m].col(k);
                        const double g = est.gamma(m, k);
                        if (shared || g <= 0.0) {
                            ps.w[m].col(k).setZero();  // estimate lies inside the nulled space
                            ps.norm_sq(m, k) = 0.0;
                        } else {
                            ps.w[m].col(k) = v / std::sqrt(g * (N - tau_s));
                            ps.norm_sq(m, k) = 1.0;
                        }
                    }
                }
            }
            break;
        }

        case PrecoderScheme::CZF: {
            require(static_cast<long>(M) * N >= K, "build_precoder: CZF requires M N >= K");
            MatrixXcd G(M * N, K);
            for (int m = 0; m < M; ++m) G.middleRows(m * N, N) = est.hhat[m];
            MatrixXcd W = detail::zf_base(G, &ps.ridge_applied);  // G^H W = I_K
            for (int m = 0; m < M; ++m) {
                ps.w[m] = W.middleRows(m * N, N);
                for (int k = 0; k < K; ++k)
                    ps.norm_sq(m, k) = std::numeric_limits<double>::quiet_NaN();
            }
            break;
        }
    }
    return ps;
}

using PrecoderFactory =
    std::function<PrecoderSet(const ChannelEstimate&, const PilotBook&)>;

inline PrecoderFactory make_precoder_factory(PrecoderScheme scheme,
                                             PrecoderGroups groups = {}) {
    return [scheme, groups](const ChannelEstimate& est, const PilotBook& pilots) {
        return build_precoder(scheme, est, pilots, groups.strong.empty() ? nullptr : &groups);
    };
}

struct DLPowerAllocation {
    MatrixXd eta;  // M x K, nonnegative
    double rho_d = 1.0;
};

// eta that splits each AP's budget equally over the UEs it can reach, i.e.
// sum_k eta_mk E{||w_mk||^2} = 1 at every AP
inline MatrixXd uniform_full_power_eta(const MatrixXd& norm_sq) {
    const int M = static_cast<int>(norm_sq.rows()), K = static_cast<int>(norm_sq.cols());
    MatrixXd eta = MatrixXd::Zero(M, K);
    for (int m = 0; m < M; ++m) {
        int active = 0;
        for (int k = 0; k < K; ++k)
            if (norm_sq(m, k) > 0.0) ++active;
        for (int k = 0; k < K; ++k)
            if (norm_sq(m, k) > 0.0) eta(m, k) = 1.0 / (active * norm_sq(m, k));
    }
    return eta;
}

// Monte Carlo estimate of E{||w_mk||^2}, for schemes without analytic metadata
inline MatrixXd estimate_precoder_norms(const PrecoderFactory& factory,
                                        const LargeScaleModel& lsm, const PilotBook& pilots,
                                        long trials, std::uint64_t seed) {
    MatrixXd acc = MatrixXd::Zero(lsm.num_aps(), lsm.num_ues());
    for (long t = 0; t < trials; ++t) {
        auto cr = draw_channels(lsm, derive_seed(seed, 0xD1, t));
        auto est = mmse_estimate(lsm, cr, pilots, derive_seed(seed, 0xD2, t));
        auto ps = factory(est, pilots);
        for (int m = 0; m < lsm.num_aps(); ++m)
            acc.row(m) += ps.w[m].colwise().squaredNorm();
    }
    return acc / static_cast<double>(trials);
}

// Hardening-bound Monte Carlo DL SE: per-UE SINR built from the sample moments
// of the effective gains a_{kk'} = sum_m sqrt(eta_mk') h_mk^T w_mk'.
struct DlMonteCarloResult {
    SEReport report;
    VectorXd ap_sample_power;  // E{||s_m||^2} / rho_d, should be <= 1
    MatrixXd sample_norm_sq;   // sample E{||w_mk||^2}
    long trials = 0;
};

inline DlMonteCarloResult dl_se_montecarlo(const PrecoderFactory& factory,
                                           const LargeScaleModel& lsm, const PilotBook& pilots,
                                           const DLPowerAllocation& power, long trials,
                                           std::uint64_t seed, double prelog = 1.0) {
    const int M = lsm.num_aps(), K = lsm.num_ues();
    MatrixXd eta_sqrt = power.eta.cwiseMax(0.0).cwiseSqrt();
    VectorXcd mean_gain = VectorXcd::Zero(K);
    MatrixXd second_moment = MatrixXd::Zero(K, K);  // E{|a_kk'|^2}
    VectorXd ap_power = VectorXd::Zero(M);
    MatrixXd norms = MatrixXd::Zero(M, K);

    for (long t = 0; t < trials; ++t) {
        auto cr = draw_channels(lsm, derive_seed(seed, 0xA1, t));
        auto est = mmse_estimate(lsm, cr, pilots, derive_seed(seed, 0xA2, t));
        auto ps = factory(est, pilots);
        MatrixXcd A = MatrixXcd::Zero(K, K);  // A(k, k') = sum_m sqrt(eta) h^H w
        for (int m = 0; m < M; ++m) {
            A += cr.h[m].adjoint() * (ps.w[m] * eta_sqrt.row(m).asDiagonal());
            const VectorXd w2 = ps.w[m].colwise().squaredNorm();
            ap_power(m) += power.eta.row(m).dot(w2);
            norms.row(m) += w2;
        }
        for (int k = 0; k < K; ++k) {
            mean_gain(k) += A(k, k);
            second_moment.row(k) += A.row(k).cwiseAbs2();
        }
    }
    mean_gain /= static_cast<double>(trials);
    second_moment /= static_cast<double>(trials);
    ap_power /= static_cast<double>(trials);
    norms /= static_cast<double>(trials);

    VectorXd sinr(K);
    for (int k = 0; k < K; ++k) {
        const double sig = std::norm(mean_gain(k));
        const double denom = power.rho_d * (second_moment.row(k).sum() - sig) + 1.0;
        sinr(k) = denom > 0.0 ? power.rho_d * sig / denom : 0.0;
    }
    DlMonteCarloResult res;
    res.report = SEReport::from_sinr(sinr, prelog);
    res.ap_sample_power = ap_power;
    res.sample_norm_sq = norms;
    res.trials = trials;
    return res;
}

// Closed-form hardening-bound DL SE for CB over uncorrelated fading with
// mutually orthogonal pilots (no coherent contamination term):
//   SINR_k = (N sqrt(rho_d) sum_m sqrt(eta_mk) gamma_mk)^2
//            / (rho_d N sum_k' sum_m eta_mk' beta_mk gamma_mk' + 1)
inline SEReport dl_se_closed_cb(const MatrixXd& beta, const MatrixXd& gamma,
                                const MatrixXd& eta, double rho_d, int N, double prelog) {
    const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
    VectorXd sinr(K);
    for (int k = 0; k < K; ++k) {
        double num = 0.0;
        for (int m = 0; m < M; ++m) num += std::sqrt(std::max(eta(m, k), 0.0)) * gamma(m, k);
        num *= N * std::sqrt(rho_d);
        double denom = 1.0;
        for (int kp = 0; kp < K; ++kp)
            for (int m = 0; m < M; ++m)
                denom += rho_d * N * eta(m, kp) * beta(m, k) * gamma(m, kp);
        sinr(k) = num * num / denom;
    }
    return SEReport::from_sinr(sinr, prelog);
}

}  // namespace cfmimo

#endif
