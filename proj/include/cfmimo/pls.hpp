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

#ifndef CFMIMO_PLS_HPP
#define CFMIMO_PLS_HPP

#include <vector>

#include "cfmimo/common.hpp"

namespace cfmimo {

// Active eavesdropper replaying UE 1's pilot with power rho_E (noise
// normalized). beta_E holds the Eve-to-AP gains.
struct EveModel {
    VectorXd beta_E;      // M
    double rho_E = 1.0;   // Eve pilot/data power over noise
    int target_ue = 0;    // index of the spoofed UE
};

struct PlsGammas {
    MatrixXd gamma;    // M x K legitimate estimate variances
    VectorXd gamma_E;  // M, Eve estimate variance via alpha_E1 gamma_1
    VectorXd alpha_E1; // M
};

// Estimate variances under the spoofing attack: the target UE's estimate is
// contaminated by the Eve pilot energy; the Eve-side variance follows from
// the collinearity of the two estimates.
inline PlsGammas pls_gamma(const MatrixXd& beta, const EveModel& eve, double rho_u, int tau_up) {
    const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
    PlsGammas g;
    g.gamma = MatrixXd::Zero(M, K);
    g.gamma_E = VectorXd::Zero(M);
    g.alpha_E1 = VectorXd::Zero(M);
    const double tr = static_cast<double>(tau_up) * rho_u;
    const double trE = static_cast<double>(tau_up) * eve.rho_E;
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            const double b = beta(m, k);
            if (k == eve.target_ue)
                g.gamma(m, k) = tr * b * b / (tr * b + trE * eve.beta_E(m) + 1.0);
            else
                g.gamma(m, k) = tr * b * b / (tr * b + 1.0);
        }
        const double b1 = beta(m, eve.target_ue);
        g.alpha_E1(m) = b1 > 0.0
                            ? (eve.rho_E * eve.beta_E(m) * eve.beta_E(m)) / (rho_u * b1 * b1)
                            : 0.0;
        g.gamma_E(m) = g.alpha_E1(m) * g.gamma(m, eve.target_ue);
    }
    return g;
}

// Hardening-bound SINRs at UE k and at the Eve for the protective partial ZF
// design; strong[m] lists the ZF-served UEs of AP m (plain MR falls out when
// all strong sets are empty). eta are per-(AP, UE) power shares with
// sum_k eta_mk <= 1 at each AP; the noise floor enters as 1/rho_d.
struct PlsSinr {
    double sinr_ue = 0.0;
    double sinr_eve = 0.0;
};

inline PlsSinr pls_sinr(const MatrixXd& eta, const std::vector<std::vector<int>>& strong,
                        const MatrixXd& beta, const PlsGammas& g, const EveModel& eve,
                        double rho_d, int N, int ue) {
    const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
    std::vector<std::vector<bool>> is_strong(M, std::vector<bool>(K, false));
    std::vector<int> s_size(M, 0);
    for (int m = 0; m < M; ++m) {
        s_size[m] = static_cast<int>(strong[m].size());
        for (int k : strong[m]) is_strong[m][k] = true;
    }

    PlsSinr out;
    {
        double num = 0.0;
        for (int m = 0; m < M; ++m)
            num += std::sqrt((N - s_size[m]) * eta(m, ue) * g.gamma(m, ue));
        num *= num;
        double den = 1.0 / rho_d;
        for (int t = 0; t < K; ++t)
            for (int m = 0; m < M; ++m) {
                const double prot = is_strong[m][ue] ? g.gamma(m, ue) : 0.0;
                den += eta(m, t) * (beta(m, ue) - prot);
            }
        out.sinr_ue = num / den;
    }
    {
        const int t1 = eve.target_ue;
        double coh = 0.0, nc = 0.0;
        for (int m = 0; m < M; ++m) {
            coh += std::sqrt(eta(m, t1) * (N - s_size[m]) * g.gamma_E(m));
            nc += eta(m, t1) * eve.beta_E(m);
            if (is_strong[m][t1]) nc -= eta(m, t1) * g.gamma_E(m);
        }
        double num = coh * coh + nc;
        double den = 1.0 / rho_d;
        for (int t = 0; t < K; ++t) {
            if (t == t1) continue;
            for (int m = 0; m < M; ++m) {
                const double prot = is_strong[m][t1] ? g.gamma_E(m) : 0.0;
                den += eta(m, t) * (eve.beta_E(m) - prot);
            }
        }
        out.sinr_eve = std::max(num, 0.0) / den;
    }
    return out;
}

// secrecy SE lower bound at the attacked UE: [log2((1+SINR_1)/(1+SINR_E))]^+
inline double pls_secrecy_se(const MatrixXd& eta, const std::vector<std::vector<int>>& strong,
                             const MatrixXd& beta, const PlsGammas& g, const EveModel& eve,
                             double rho_d, int N) {
    const PlsSinr s = pls_sinr(eta, strong, beta, g, eve, rho_d, N, eve.target_ue);
    return std::max(0.0, std::log2((1.0 + s.sinr_ue) / (1.0 + s.sinr_eve)));
}

}  // namespace cfmimo

#endif
