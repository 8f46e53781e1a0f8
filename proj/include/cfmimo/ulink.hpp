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

#ifndef CFMIMO_ULINK_HPP
#define CFMIMO_ULINK_HPP

#include <vector>

#include "cfmimo/training.hpp"

namespace cfmimo {

enum class CombinerScheme { MR, LMMSE, LPMMSE, CMMSE };

inline const char* to_string(CombinerScheme s) {
    switch (s) {
        case CombinerScheme::MR: return "MR";
        case CombinerScheme::LMMSE: return "L-MMSE";
        case CombinerScheme::LPMMSE: return "LP-MMSE";
        case CombinerScheme::CMMSE: return "C-MMSE";
    }
    return "?";
}

// AP/UE association. ap_ues[l] = D_l, ue_aps[k] = M_k; k in D_l iff l in M_k.
struct ServingSets {
    std::vector<std::vector<int>> ap_ues;
    std::vector<std::vector<int>> ue_aps;

    static ServingSets all_serve(int M, int K) {
        ServingSets s;
        s.ap_ues.assign(M, {});
        s.ue_aps.assign(K, {});
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k) s.ap_ues[m].push_back(k);
        for (int k = 0; k < K; ++k)
            for (int m = 0; m < M; ++m) s.ue_aps[k].push_back(m);
        return s;
    }

    // per UE: smallest AP set capturing `delta` of its total beta mass
    static ServingSets user_centric(const MatrixXd& beta, double delta = 0.95) {
        const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
        ServingSets s;
        s.ap_ues.assign(M, {});
        s.ue_aps.assign(K, {});
        for (int k = 0; k < K; ++k) {
            std::vector<int> order(M);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return beta(a, k) > beta(b, k); });
            const double total = beta.col(k).sum();
            double acc = 0.0;
            for (int m : order) {
                s.ue_aps[k].push_back(m);
                acc += beta(m, k);
                if (acc >= delta * total) break;
            }
            std::sort(s.ue_aps[k].begin(), s.ue_aps[k].end());
            for (int m : s.ue_aps[k]) s.ap_ues[m].push_back(k);
        }
        return s;
    }
};

// Local combining vectors, one per (AP, UE). All UEs transmit, so the MMSE
// interference sums run over every UE regardless of serving sets; LP-MMSE
// restricts the sum to the AP's own served set.
struct CombinerSet {
    CombinerScheme scheme = CombinerScheme::MR;
    std::vector<MatrixXcd> v;  // per AP: N x K
};

inline CombinerSet build_combiner(CombinerScheme scheme, const ChannelEstimate& est,
                                  const ServingSets& serving, double rho_u,
                                  const VectorXd& varsigma) {
    const int M = est.num_aps(), K = est.num_ues(), N = est.antennas;
    require(scheme != CombinerScheme::CMMSE,
            "build_combiner: C-MMSE lives on the stacked space, use ul_se_level4");
    CombinerSet cs;
    cs.scheme = scheme;
    cs.v.assign(M, MatrixXcd::Zero(N, K));
    for (int m = 0; m < M; ++m) {
        if (scheme == CombinerScheme::MR) {
            cs.v[m] = est.hhat[m];
            continue;
        }
        MatrixXcd Z = MatrixXcd::Identity(N, N);
        const std::vector<int>* idx = nullptr;
        std::vector<int> all(K);
        std::iota(all.begin(), all.end(), 0);
        idx = (scheme == CombinerScheme::LPMMSE) ? &serving.ap_ues[m] : &all;
        for (int i : *idx) {
            const double s = varsigma(i) * rho_u;
            Z += s * (est.hhat[m].col(i) * est.hhat[m].col(i).adjoint() + est.err_cov_mat(m, i));
        }
        Eigen::LLT<MatrixXcd> llt(Z);
        for (int k : serving.ap_ues[m])
            cs.v[m].col(k) = varsigma(k) * rho_u * llt.solve(est.hhat[m].col(k));
    }
    return cs;
}

// Statistics of the effective channels g_ki[l] = v_kl^H h_il over the serving
// APs of UE k, as needed by the use-then-forget bound and LSF decoding.
struct UlMoments {
    ServingSets serving;
    std::vector<VectorXcd> mean_gain;             // E{g_kk}, length |M_k|
    std::vector<std::vector<MatrixXcd>> gain_sq;  // per k, per i: E{g_ki g_ki^H}
    std::vector<VectorXd> combiner_power;         // E{||v_kl||^2} over M_k
    long trials = 0;
};

inline UlMoments ul_moments_montecarlo(CombinerScheme scheme, const LargeScaleModel& lsm,
                                       const PilotBook& pilots, const ServingSets& serving,
                                       double rho_u, const VectorXd& varsigma, long trials,
                                       std::uint64_t seed) {
    const int M = lsm.num_aps(), K = lsm.num_ues();
    UlMoments mo;
    mo.serving = serving;
    mo.trials = trials;
    mo.mean_gain.resize(K);
    mo.gain_sq.resize(K);
    mo.combiner_power.resize(K);
    for (int k = 0; k < K; ++k) {
        const int A = static_cast<int>(serving.ue_aps[k].size());
        mo.mean_gain[k] = VectorXcd::Zero(A);
        mo.gain_sq[k].assign(K, MatrixXcd::Zero(A, A));
        mo.combiner_power[k] = VectorXd::Zero(A);
    }
    for (long t = 0; t < trials; ++t) {
        auto cr = draw_channels(lsm, derive_seed(seed, 0xB1, t));
        auto est = mmse_estimate(lsm, cr, pilots, derive_seed(seed, 0xB2, t));
        auto cs = build_combiner(scheme, est, serving, rho_u, varsigma);
        for (int k = 0; k < K; ++k) {
            const auto& aps = mo.serving.ue_aps[k];
            const int A = static_cast<int>(aps.size());
            MatrixXcd g(A, K);  // g(a, i) = v_k,ap^H h_i,ap
            for (int a = 0; a < A; ++a) {
                const int m = aps[a];
                g.row(a) = cs.v[m].col(k).adjoint() * cr.h[m];
                mo.combiner_power[k](a) += cs.v[m].col(k).squaredNorm();
            }
            mo.mean_gain[k] += g.col(k);
            for (int i = 0; i < K; ++i) mo.gain_sq[k][i] += g.col(i) * g.col(i).adjoint();
        }
    }
    const double inv = 1.0 / static_cast<double>(trials);
    for (int k = 0; k < K; ++k) {
        mo.mean_gain[k] *= inv;
        mo.combiner_power[k] *= inv;
        for (auto& m : mo.gain_sq[k]) m *= inv;
    }
    return mo;
}

// Closed-form MR moments over uncorrelated fading; the analytic counterpart
// of ul_moments_montecarlo used as the oracle path.
inline UlMoments ul_moments_closed_mr(const LargeScaleModel& lsm, const PilotBook& pilots,
                                      const ServingSets& serving) {
    require(!lsm.correlated, "ul_moments_closed_mr: uncorrelated fading only");
    const int K = lsm.num_ues(), N = lsm.antennas;
    const double tau_rho = pilots.tau_up * pilots.rho_p;
    UlMoments mo;
    mo.serving = serving;

    // psi_mp and coherent cross gains chi_ki = c_k sqrt(tau rho varsigma_i) beta_i
    const int M = lsm.num_aps();
    MatrixXd psi = MatrixXd::Ones(M, pilots.tau_up);
    for (int i = 0; i < K; ++i)
        for (int m = 0; m < M; ++m)
            psi(m, pilots.assignment[i]) += tau_rho * pilots.varsigma(i) * lsm.beta(m, i);

    auto gamma = [&](int m, int k) {
        const double num = tau_rho * pilots.varsigma(k);
        return num * lsm.beta(m, k) * lsm.beta(m, k) / psi(m, pilots.assignment[k]);
    };
    auto chi = [&](int m, int k, int i) {
        // nonzero only for copilot i; equals gamma for i == k
        const double ck = std::sqrt(tau_rho * pilots.varsigma(k)) * lsm.beta(m, k) /
                          psi(m, pilots.assignment[k]);
        return ck * std::sqrt(tau_rho * pilots.varsigma(i)) * lsm.beta(m, i);
    };

    mo.mean_gain.resize(K);
    mo.gain_sq.resize(K);
    mo.combiner_power.resize(K);
    for (int k = 0; k < K; ++k) {
        const auto& aps = serving.ue_aps[k];
        const int A = static_cast<int>(aps.size());
        mo.mean_gain[k] = VectorXcd::Zero(A);
        mo.combiner_power[k] = VectorXd::Zero(A);
        for (int a = 0; a < A; ++a) {
            mo.mean_gain[k](a) = N * gamma(aps[a], k);
            mo.combiner_power[k](a) = N * gamma(aps[a], k);
        }
        mo.gain_sq[k].assign(K, MatrixXcd::Zero(A, A));
        for (int i = 0; i < K; ++i) {
            const bool copilot = pilots.assignment[i] == pilots.assignment[k];
            for (int a = 0; a < A; ++a) {
                for (int b = 0; b < A; ++b) {
                    double v = 0.0;
                    if (copilot) v += N * N * chi(aps[a], k, i) * chi(aps[b], k, i);
                    if (a == b) v += N * gamma(aps[a], k) * lsm.beta(aps[a], i);
                    mo.gain_sq[k][i](a, b) = v;
                }
            }
        }
    }
    mo.trials = 0;
    return mo;
}

struct LSFDWeights {
    std::vector<VectorXcd> a;  // per UE, length |M_k|
};

// Optimal LSF decoding weights: a_k = (sum_i rho varsigma_i E{g_ki g_ki^H} + D_k)^-1 E{g_kk}
inline LSFDWeights lsfd_optimal(const UlMoments& mo, double rho_u, const VectorXd& varsigma) {
    const int K = static_cast<int>(mo.mean_gain.size());
    LSFDWeights w;
    w.a.resize(K);
    for (int k = 0; k < K; ++k) {
        const int A = static_cast<int>(mo.mean_gain[k].size());
        MatrixXcd Z = mo.combiner_power[k].asDiagonal().toDenseMatrix().cast<cxd>();
        for (int i = 0; i < K; ++i) Z += rho_u * varsigma(i) * mo.gain_sq[k][i];
        Eigen::LLT<MatrixXcd> llt(Z);
        if (llt.info() != Eigen::Success)
            throw numerical_domain_error("lsfd_optimal: singular weighting system");
        w.a[k] = llt.solve(mo.mean_gain[k]);
        (void)A;
    }
    return w;
}

inline LSFDWeights lsfd_uniform(const UlMoments& mo) {
    LSFDWeights w;
    w.a.resize(mo.mean_gain.size());
    for (std::size_t k = 0; k < mo.mean_gain.size(); ++k)
        w.a[k] = VectorXcd::Ones(mo.mean_gain[k].size());
    return w;
}

// Use-then-forget SINR for UE k under weights a_k
inline double ul_utf_sinr(const UlMoments& mo, const VectorXcd& a, int k, double rho_u,
                          const VectorXd& varsigma) {
    const double sig = rho_u * varsigma(k) * std::norm((cxd)(a.adjoint() * mo.mean_gain[k])(0));
    double den = -sig;
    for (int i = 0; i < static_cast<int>(mo.gain_sq[k].size()); ++i)
        den += rho_u * varsigma(i) * (a.adjoint() * mo.gain_sq[k][i] * a)(0).real();
    den += (a.array().abs2() * mo.combiner_power[k].array()).sum();
    return den > 0.0 ? sig / den : 0.0;
}

inline SEReport ul_se_level3(const UlMoments& mo, const LSFDWeights& w, double rho_u,
                             const VectorXd& varsigma, double prelog) {
    const int K = static_cast<int>(mo.mean_gain.size());
    VectorXd sinr(K);
    for (int k = 0; k < K; ++k) sinr(k) = ul_utf_sinr(mo, w.a[k], k, rho_u, varsigma);
    return SEReport::from_sinr(sinr, prelog);
}

inline SEReport ul_se_level2(const UlMoments& mo, double rho_u, const VectorXd& varsigma,
                             double prelog) {
    return ul_se_level3(mo, lsfd_uniform(mo), rho_u, varsigma, prelog);
}

// Level 1: every UE is decoded at the single serving AP with the best local SE
inline SEReport ul_se_level1(const UlMoments& mo, double rho_u, const VectorXd& varsigma,
                             double prelog) {
    const int K = static_cast<int>(mo.mean_gain.size());
    VectorXd sinr(K);
    for (int k = 0; k < K; ++k) {
        const int A = static_cast<int>(mo.mean_gain[k].size());
        double best = 0.0;
        for (int a = 0; a < A; ++a) {
            VectorXcd e = VectorXcd::Zero(A);
            e(a) = 1.0;
            best = std::max(best, ul_utf_sinr(mo, e, k, rho_u, varsigma));
        }
        sinr(k) = best;
    }
    return SEReport::from_sinr(sinr, prelog);
}

// Fully centralized bound: per-trial instantaneous SINR on the stacked MN
// space, averaged inside the log. For C-MMSE the quotient reduces to the
// optimal value via a rank-one update of the full interference matrix.
inline SEReport ul_se_level4(CombinerScheme scheme, const LargeScaleModel& lsm,
                             const PilotBook& pilots, double rho_u, const VectorXd& varsigma,
                             long trials, std::uint64_t seed, double prelog,
                             bool perfect_csi = false) {
    const int M = lsm.num_aps(), K = lsm.num_ues(), N = lsm.antennas;
    const int MN = M * N;
    VectorXd mean_se = VectorXd::Zero(K);

    // error-covariance diagonal contribution is deterministic
    MatrixXcd Cterm = MatrixXcd::Zero(MN, MN);
    if (!perfect_csi) {
        ChannelRealization dummy;  // statistics only
        auto cr0 = draw_channels(lsm, derive_seed(seed, 0xFE, 0));
        auto est0 = mmse_estimate(lsm, cr0, pilots, derive_seed(seed, 0xFF, 0));
        for (int m = 0; m < M; ++m) {
            MatrixXcd block = MatrixXcd::Zero(N, N);
            for (int i = 0; i < K; ++i)
                block += rho_u * varsigma(i) * est0.err_cov_mat(m, i);
            Cterm.block(m * N, m * N, N, N) = block;
        }
        (void)dummy;
    }

    for (long t = 0; t < trials; ++t) {
        auto cr = draw_channels(lsm, derive_seed(seed, 0xB1, t));
        MatrixXcd H(MN, K);
        if (perfect_csi) {
            for (int m = 0; m < M; ++m) H.middleRows(m * N, N) = cr.h[m];
        } else {
            auto est = mmse_estimate(lsm, cr, pilots, derive_seed(seed, 0xB2, t));
            for (int m = 0; m < M; ++m) H.middleRows(m * N, N) = est.hhat[m];
        }
        MatrixXcd Z = MatrixXcd::Identity(MN, MN) + Cterm;
        for (int i = 0; i < K; ++i)
            Z += rho_u * varsigma(i) * (H.col(i) * H.col(i).adjoint());
        Eigen::LLT<MatrixXcd> llt(Z);
        if (llt.info() != Eigen::Success)
            throw numerical_domain_error("ul_se_level4: interference matrix not PD");
        for (int k = 0; k < K; ++k) {
            const double sk = rho_u * varsigma(k);
            double sinr;
            if (scheme == CombinerScheme::CMMSE) {
                const double q = (H.col(k).adjoint() * llt.solve(H.col(k)))(0).real();
                sinr = sk * q / std::max(1.0 - sk * q, 1e-14);
            } else {
                // MR on the stacked space
                const VectorXcd v = H.col(k);
                const double num = sk * std::norm((cxd)(v.adjoint() * H.col(k))(0));
                const double den =
                    (v.adjoint() * Z * v)(0).real() - num;
                sinr = den > 0.0 ? num / den : 0.0;
            }
            mean_se(k) += std::log2(1.0 + sinr);
        }
    }
    mean_se /= static_cast<double>(trials);
    return SEReport::from_se(prelog * mean_se);
}

}  // namespace cfmimo

#endif
