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

#ifndef CFMIMO_NAFD_HPP
#define CFMIMO_NAFD_HPP

#include <utility>
#include <vector>

#include "cfmimo/common.hpp"

namespace cfmimo {

// Large-scale statistics for a network with per-AP duplex modes: separate DL
// and UL UE populations, UE-to-UE cross gains, and inter-AP gains whose
// diagonal carries the residual self-interference ratio.
struct NafdScalars {
    MatrixXd beta_dl, gamma_dl;  // M x Kd
    MatrixXd beta_ul, gamma_ul;  // M x Ku
    MatrixXd beta_du;            // Kd x Ku, DL-UE <- UL-UE
    MatrixXd beta_ap;            // M x M, diagonal = sigma_SI^2 / sigma_n^2
    int N = 1;
    double rho_u = 1.0, rho_d = 1.0;

    int num_aps() const { return static_cast<int>(beta_dl.rows()); }
    int num_dl() const { return static_cast<int>(beta_dl.cols()); }
    int num_ul() const { return static_cast<int>(beta_ul.cols()); }
};

// Mode bits plus power/weight variables. theta are amplitude coefficients
// (power = theta^2); a_m + b_m = 1 and theta row is zero at UL APs.
struct NafdState {
    std::vector<int> a, b;  // DL / UL mode bits
    MatrixXd theta;         // M x Kd
    VectorXd varsigma;      // Ku
    MatrixXd alpha;         // M x Ku LSFD weights

    void validate(const NafdScalars& s) const {
        const int M = s.num_aps();
        require(static_cast<int>(a.size()) == M && static_cast<int>(b.size()) == M,
                "NafdState: mode vector size");
        for (int m = 0; m < M; ++m) {
            require(a[m] + b[m] == 1, "NafdState: each AP is either DL or UL");
            if (a[m] == 0)
                require(theta.row(m).cwiseAbs().maxCoeff() == 0.0,
                        "NafdState: UL AP with nonzero DL power");
            double p = 0.0;
            for (int k = 0; k < s.num_dl(); ++k)
                p += s.gamma_dl(m, k) * theta(m, k) * theta(m, k);
            require(p <= 1.0 / s.N + 1e-9, "NafdState: per-AP power constraint violated");
        }
        require((varsigma.array() >= -1e-12).all() && (varsigma.array() <= 1.0 + 1e-12).all(),
                "NafdState: varsigma out of [0,1]");
        require((alpha.array().abs() <= 1.0 + 1e-9).all(), "NafdState: |alpha| must be <= 1");
    }
};

// the fixed power rule used by the greedy/random mode-assignment baselines:
// theta_mk = a_m / sqrt(N Kd gamma_dl), varsigma = 1, alpha = 1
inline NafdState nafd_fixed_power_state(const NafdScalars& s, const std::vector<int>& a,
                                        const std::vector<int>& b) {
    NafdState st;
    st.a = a;
    st.b = b;
    const int M = s.num_aps(), Kd = s.num_dl(), Ku = s.num_ul();
    st.theta = MatrixXd::Zero(M, Kd);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < Kd; ++k)
            if (a[m] == 1 && s.gamma_dl(m, k) > 0.0)
                st.theta(m, k) = 1.0 / std::sqrt(s.N * Kd * s.gamma_dl(m, k));
    st.varsigma = VectorXd::Ones(Ku);
    st.alpha = MatrixXd::Ones(M, Ku);
    return st;
}

// Closed-form UL and DL SEs of the mixed-mode network. The UL denominator
// collects same-direction interference, DL-AP-to-UL-AP leakage, and combined
// noise; the DL denominator collects beamforming-gain uncertainty plus
// UL-UE-to-DL-UE cross-link interference.
inline std::pair<VectorXd, VectorXd> nafd_se(const NafdState& st, const NafdScalars& s,
                                             double prelog) {
    const int M = s.num_aps(), Kd = s.num_dl(), Ku = s.num_ul();
    VectorXd ul_se(Ku), dl_se(Kd);

    for (int l = 0; l < Ku; ++l) {
        double num = 0.0;
        for (int m = 0; m < M; ++m)
            num += std::sqrt(st.b[m] * st.varsigma(l)) * st.alpha(m, l) * s.gamma_ul(m, l);
        num = s.N * s.rho_u * num * num;

        double den = 0.0;
        for (int m = 0; m < M; ++m) {
            if (st.b[m] == 0) continue;
            const double a2g = st.alpha(m, l) * st.alpha(m, l) * s.gamma_ul(m, l);
            for (int q = 0; q < Ku; ++q)
                den += s.rho_u * st.varsigma(q) * a2g * s.beta_ul(m, q);
            for (int i = 0; i < M; ++i)
                for (int k = 0; k < Kd; ++k)
                    den += s.rho_d * s.N * st.theta(i, k) * st.theta(i, k) * a2g *
                           s.beta_ap(m, i) * s.gamma_dl(i, k);
            den += a2g;
        }
        ul_se(l) = (den > 0.0 && num > 0.0) ? prelog * log2_1p(num / den) : 0.0;
    }

    for (int k = 0; k < Kd; ++k) {
        double num = 0.0;
        for (int m = 0; m < M; ++m) num += st.theta(m, k) * s.gamma_dl(m, k);
        num = s.N * s.N * s.rho_d * num * num;
        double den = 1.0;
        for (int kp = 0; kp < Kd; ++kp)
            for (int m = 0; m < M; ++m)
                den += s.rho_d * s.N * st.theta(m, kp) * st.theta(m, kp) * s.beta_dl(m, k) *
                       s.gamma_dl(m, kp);
        for (int l = 0; l < Ku; ++l) den += s.rho_u * st.varsigma(l) * s.beta_du(k, l);
        dl_se(k) = prelog * log2_1p(num / den);
    }
    return {ul_se, dl_se};
}

// full-duplex special case: every AP runs both directions and the inter-AP
// diagonal acts as self-interference
inline std::pair<VectorXd, VectorXd> nafd_fd_se(const NafdScalars& s, const MatrixXd& theta,
                                                const VectorXd& varsigma, const MatrixXd& alpha,
                                                double prelog) {
    NafdState st;
    st.a.assign(s.num_aps(), 1);
    st.b.assign(s.num_aps(), 1);
    st.theta = theta;
    st.varsigma = varsigma;
    st.alpha = alpha;
    return nafd_se(st, s, prelog);
}

// Half-duplex reference: DL and UL get equal halves of the data phase with
// N_t transmit / N_r receive antennas; no cross-link or inter-AP terms.
inline std::pair<VectorXd, VectorXd> nafd_hd_se(const MatrixXd& theta, const VectorXd& varsigma,
                                                const MatrixXd& alpha, const NafdScalars& s,
                                                int N_t, int N_r, double prelog_half) {
    const int M = s.num_aps(), Kd = s.num_dl(), Ku = s.num_ul();
    VectorXd ul_se(Ku), dl_se(Kd);

    for (int k = 0; k < Kd; ++k) {
        double num = 0.0;
        for (int m = 0; m < M; ++m) num += theta(m, k) * s.gamma_dl(m, k);
        num = static_cast<double>(N_t) * N_t * s.rho_d * num * num;
        double den = 1.0;
        for (int kp = 0; kp < Kd; ++kp)
            for (int m = 0; m < M; ++m)
                den += s.rho_d * N_t * theta(m, kp) * theta(m, kp) * s.beta_dl(m, k) *
                       s.gamma_dl(m, kp);
        dl_se(k) = prelog_half * log2_1p(num / den);
    }

    for (int l = 0; l < Ku; ++l) {
        double num = 0.0;
        for (int m = 0; m < M; ++m)
            num += std::sqrt(varsigma(l)) * alpha(m, l) * s.gamma_ul(m, l);
        num = N_r * s.rho_u * num * num;
        double den = 0.0;
        for (int m = 0; m < M; ++m) {
            const double a2g = alpha(m, l) * alpha(m, l) * s.gamma_ul(m, l);
            for (int q = 0; q < Ku; ++q) den += s.rho_u * varsigma(q) * a2g * s.beta_ul(m, q);
            den += a2g;
        }
        ul_se(l) = (den > 0.0 && num > 0.0) ? prelog_half * log2_1p(num / den) : 0.0;
    }
    return {ul_se, dl_se};
}

inline double nafd_sum_se(const NafdScalars& s, const std::vector<int>& a,
                          const std::vector<int>& b, double prelog) {
    const NafdState st = nafd_fixed_power_state(s, a, b);
    auto [ul, dl] = nafd_se(st, s, prelog);
    return ul.sum() + dl.sum();
}

// Greedy mode assignment: one AP committed per step, choosing the (AP, mode)
// pair with the largest incremental sum SE under the fixed power rule.
// Unassigned APs stay silent.
inline std::pair<std::vector<int>, std::vector<int>> nafd_greedy_modes(const NafdScalars& s,
                                                                       double prelog) {
    const int M = s.num_aps();
    std::vector<int> a(M, 0), b(M, 0);
    std::vector<bool> assigned(M, false);
    for (int step = 0; step < M; ++step) {
        int best_m = -1, best_mode = 0;
        double best = -1.0;
        for (int m = 0; m < M; ++m) {
            if (assigned[m]) continue;
            for (int mode = 0; mode < 2; ++mode) {
                (mode == 0 ? a : b)[m] = 1;
                const double v = nafd_sum_se(s, a, b, prelog);
                (mode == 0 ? a : b)[m] = 0;
                if (v > best + 1e-15) {
                    best = v;
                    best_m = m;
                    best_mode = mode;
                }
            }
        }
        (best_mode == 0 ? a : b)[best_m] = 1;
        assigned[best_m] = true;
    }
    // silent APs are invalid in the final state; every AP holds one mode here
    return {a, b};
}

struct NafdModeSearch {
    std::vector<int> a, b;
    double sum_se = 0.0;
};

inline NafdModeSearch nafd_exhaustive_modes(const NafdScalars& s, double prelog) {
    const int M = s.num_aps();
    require(M <= 12, "nafd_exhaustive_modes: M too large for enumeration (max 12)");
    NafdModeSearch best;
    best.sum_se = -1.0;
    for (unsigned mask = 0; mask < (1u << M); ++mask) {
        std::vector<int> a(M), b(M);
        for (int m = 0; m < M; ++m) {
            a[m] = (mask >> m) & 1u;
            b[m] = 1 - a[m];
        }
        const double v = nafd_sum_se(s, a, b, prelog);
        if (v > best.sum_se) {
            best.sum_se = v;
            best.a = a;
            best.b = b;
        }
    }
    return best;
}

}  // namespace cfmimo

#endif
