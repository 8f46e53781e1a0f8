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

#ifndef CFMIMO_NOMA_HPP
#define CFMIMO_NOMA_HPP

#include <algorithm>
#include <vector>

#include "cfmimo/netmodel.hpp"
#include "cfmimo/powerctrl.hpp"

namespace cfmimo {

// Clustered network: one shared pilot per cluster, clusters mutually
// orthogonal. Each AP estimates the per-cluster composite channel; members
// are ordered strongest-first, which is also the within-cluster decoding
// order of the superposed signals (last index decoded first, index 0 last).
struct NomaClusters {
    int M = 0, N = 1;
    double rho_d = 1.0;
    std::vector<std::vector<int>> members;  // per cluster: UE ids, strong first
    MatrixXd beta;                          // M x K (original UE indexing)
    MatrixXd c;                             // M x L composite-estimate coefficient
    MatrixXd gamma;                         // M x L composite-estimate variance

    int num_clusters() const { return static_cast<int>(members.size()); }
    double beta_sum(int m, int l) const {
        double s = 0.0;
        for (int u : members[l]) s += beta(m, u);
        return s;
    }
};

// composite-channel estimate statistics for one (AP, cluster) pair:
//   c = sqrt(tau rho) sum beta / (tau rho sum beta + 1),  gamma = sqrt(tau rho) sum beta c
inline std::pair<double, double> noma_cluster_estimate(double beta_sum, int tau_up, double rho_p) {
    require(rho_p > 0.0, "noma_cluster_estimate: rho_p must be positive");
    const double tr = static_cast<double>(tau_up) * rho_p;
    const double c = std::sqrt(tr) * beta_sum / (tr * beta_sum + 1.0);
    return {c, std::sqrt(tr) * beta_sum * c};
}

inline NomaClusters make_noma_clusters(const MatrixXd& beta,
                                       const std::vector<std::vector<int>>& clusters, int N,
                                       int tau_up, double rho_p, double rho_d) {
    NomaClusters nc;
    nc.M = static_cast<int>(beta.rows());
    nc.N = N;
    nc.rho_d = rho_d;
    nc.beta = beta;
    nc.members = clusters;
    const int L = nc.num_clusters();
    // decoding order: descending aggregate beta (strongest first)
    for (auto& cl : nc.members) {
        std::sort(cl.begin(), cl.end(), [&](int a, int b) {
            const double sa = beta.col(a).sum(), sb = beta.col(b).sum();
            if (sa != sb) return sa > sb;
            return a < b;
        });
    }
    nc.c = MatrixXd::Zero(nc.M, L);
    nc.gamma = MatrixXd::Zero(nc.M, L);
    for (int m = 0; m < nc.M; ++m)
        for (int l = 0; l < L; ++l) {
            auto [c, g] = noma_cluster_estimate(nc.beta_sum(m, l), tau_up, rho_p);
            nc.c(m, l) = c;
            nc.gamma(m, l) = g;
        }
    return nc;
}

// Effective SINR at UE j of cluster l while decoding the signal of in-cluster
// position k (0-based; position 0 is the strongest UE, decoded last). Signals
// at earlier positions are still superposed (coherent terms); later positions
// were decoded and cancelled up to their non-coherent residue, which lives in
// the all-pairs term together with inter-cluster interference.
inline double noma_sinr(const NomaClusters& nc, const std::vector<MatrixXd>& eta, int l, int j,
                        int k) {
    const int M = nc.M, L = nc.num_clusters();
    const int ue_j = nc.members[l][j];
    auto wgt = [&](int m) { return nc.gamma(m, l) * nc.beta(m, ue_j) / nc.beta_sum(m, l); };

    double num = 0.0;
    for (int m = 0; m < M; ++m) num += std::sqrt(std::max(eta[l](m, k), 0.0)) * wgt(m);
    num *= static_cast<double>(nc.N);
    num *= num;

    double den = 1.0 / nc.rho_d;
    for (int kp = 0; kp < k; ++kp) {
        double coh = 0.0;
        for (int m = 0; m < M; ++m) coh += std::sqrt(std::max(eta[l](m, kp), 0.0)) * wgt(m);
        coh *= static_cast<double>(nc.N);
        den += coh * coh;
    }
    for (int lp = 0; lp < L; ++lp)
        for (int kp = 0; kp < static_cast<int>(nc.members[lp].size()); ++kp)
            for (int m = 0; m < M; ++m)
                den += nc.N * eta[lp](m, kp) * nc.beta(m, ue_j) * nc.gamma(m, lp);
    return num / den;
}

// per-UE effective SE: the signal at position k must be decodable by every
// UE at position j <= k, so its effective SINR is the minimum over those
inline VectorXd noma_effective_se(const NomaClusters& nc, const std::vector<MatrixXd>& eta,
                                  double prelog) {
    const int K = static_cast<int>(nc.beta.cols());
    VectorXd se = VectorXd::Zero(K);
    for (int l = 0; l < nc.num_clusters(); ++l) {
        const int Kl = static_cast<int>(nc.members[l].size());
        for (int k = 0; k < Kl; ++k) {
            double sinr = 1e300;
            for (int j = 0; j <= k; ++j) sinr = std::min(sinr, noma_sinr(nc, eta, l, j, k));
            se(nc.members[l][k]) = prelog * log2_1p(sinr);
        }
    }
    return se;
}

enum class PairingScheme { CLOSE, FAR, RANDOM };

// Greedy sequential pairing into clusters of two by the distance criterion
inline std::vector<std::vector<int>> noma_pairing(const NetworkGeometry& geo,
                                                  PairingScheme scheme, std::uint64_t seed = 0) {
    const int K = geo.num_ues();
    require(K % 2 == 0, "noma_pairing: K must be even for pairs");
    std::vector<std::vector<int>> clusters;
    std::vector<int> left(K);
    std::iota(left.begin(), left.end(), 0);

    if (scheme == PairingScheme::RANDOM) {
        Rng rng(derive_seed(seed, 0x92, 0));
        for (int i = K - 1; i > 0; --i)
            std::swap(left[i], left[rng.uniform_int(i + 1)]);
        for (int i = 0; i < K; i += 2) {
            std::vector<int> p{left[i], left[i + 1]};
            std::sort(p.begin(), p.end());
            clusters.push_back(p);
        }
        return clusters;
    }

    while (!left.empty()) {
        int bi = 0, bj = 1;
        double best = scheme == PairingScheme::CLOSE ? 1e300 : -1.0;
        for (std::size_t i = 0; i < left.size(); ++i) {
            for (std::size_t j = i + 1; j < left.size(); ++j) {
                const double d = geo.distance(geo.ue_positions[left[i]], geo.ue_positions[left[j]]);
                const bool better = scheme == PairingScheme::CLOSE ? d < best : d > best;
                if (better) {
                    best = d;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        clusters.push_back({left[bi], left[bj]});
        left.erase(left.begin() + bj);
        left.erase(left.begin() + bi);
    }
    for (auto& c : clusters) std::sort(c.begin(), c.end());
    return clusters;
}

// Max-min over effective SINRs: every (decoder position j, signal position k)
// pair with j <= k becomes one cone constraint; per-AP budgets are
// sum_{l,k} eta gamma_ml <= 1/N.
inline PowerProblem make_noma_maxmin_problem(const NomaClusters& nc) {
    const int M = nc.M, L = nc.num_clusters();
    std::vector<int> off(L + 1, 0);
    for (int l = 0; l < L; ++l) off[l + 1] = off[l] + static_cast<int>(nc.members[l].size());
    const int n = M * off[L];
    auto id = [&](int m, int l, int k) { return m * off[L] + off[l] + k; };

    PowerProblem p;
    p.num_vars = n;
    p.objective = PowerObjective::MAXMIN;
    for (int l = 0; l < L; ++l) {
        const int Kl = static_cast<int>(nc.members[l].size());
        for (int k = 0; k < Kl; ++k) {
            for (int j = 0; j <= k; ++j) {
                SinrConstraint s;
                s.c = VectorXd::Zero(n);
                s.q = VectorXd::Zero(n);
                s.sigma = 1.0 / nc.rho_d;
                const int ue_j = nc.members[l][j];
                for (int m = 0; m < M; ++m)
                    s.c(id(m, l, k)) =
                        nc.N * nc.gamma(m, l) * nc.beta(m, ue_j) / nc.beta_sum(m, l);
                s.D = MatrixXd::Zero(k, n);
                for (int kp = 0; kp < k; ++kp)
                    for (int m = 0; m < M; ++m)
                        s.D(kp, id(m, l, kp)) =
                            nc.N * nc.gamma(m, l) * nc.beta(m, ue_j) / nc.beta_sum(m, l);
                for (int lp = 0; lp < L; ++lp)
                    for (int kp = 0; kp < static_cast<int>(nc.members[lp].size()); ++kp)
                        for (int m = 0; m < M; ++m)
                            s.q(id(m, lp, kp)) = nc.N * nc.beta(m, ue_j) * nc.gamma(m, lp);
                p.sinr.push_back(std::move(s));
            }
        }
    }
    p.constraints.idx.resize(M);
    p.constraints.g.resize(M);
    p.constraints.zeta.assign(M, 1.0 / nc.N);
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < static_cast<int>(nc.members[l].size()); ++k) {
                p.constraints.idx[m].push_back(id(m, l, k));
                p.constraints.g[m].conservativeResize(p.constraints.idx[m].size());
                p.constraints.g[m](p.constraints.idx[m].size() - 1) = nc.gamma(m, l);
            }
    }
    return p;
}

// unpack a solved mu back into per-cluster eta matrices (eta = mu^2)
inline std::vector<MatrixXd> noma_unpack_eta(const NomaClusters& nc, const VectorXd& mu) {
    const int M = nc.M, L = nc.num_clusters();
    std::vector<int> off(L + 1, 0);
    for (int l = 0; l < L; ++l) off[l + 1] = off[l] + static_cast<int>(nc.members[l].size());
    std::vector<MatrixXd> eta(L);
    for (int l = 0; l < L; ++l) {
        eta[l] = MatrixXd::Zero(M, nc.members[l].size());
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < static_cast<int>(nc.members[l].size()); ++k) {
                const double v = mu(m * off[L] + off[l] + k);
                eta[l](m, k) = v * v;
            }
    }
    return eta;
}

}  // namespace cfmimo

#endif
