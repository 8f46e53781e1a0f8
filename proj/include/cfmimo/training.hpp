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

#ifndef CFMIMO_TRAINING_HPP
#define CFMIMO_TRAINING_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "cfmimo/netmodel.hpp"

namespace cfmimo {

// Pilot assignment plus pilot-power bookkeeping. Orthogonal sequences are
// never materialized: all estimation works on the per-pilot projected signal,
// which is a sufficient statistic. All SNRs are noise-normalized.
struct PilotBook {
    int tau_up = 1;
    std::vector<int> assignment;             // pilot index per UE, 0-based
    std::vector<std::vector<int>> copilot;   // P_k per UE (includes k), sorted
    VectorXd varsigma;                       // pilot power control, in [0,1]
    double rho_p = 100.0;                    // p_p / noise_power

    int num_ues() const { return static_cast<int>(assignment.size()); }

    void rebuild_copilot_sets() {
        const int K = num_ues();
        copilot.assign(K, {});
        for (int k = 0; k < K; ++k)
            for (int t = 0; t < K; ++t)
                if (assignment[t] == assignment[k]) copilot[k].push_back(t);
    }

    bool orthogonal() const {
        return std::all_of(copilot.begin(), copilot.end(),
                           [](const auto& p) { return p.size() == 1; });
    }

    static PilotBook from_assignment(std::vector<int> assignment, int tau_up, double rho_p) {
        PilotBook pb;
        pb.tau_up = tau_up;
        pb.assignment = std::move(assignment);
        pb.rho_p = rho_p;
        pb.varsigma = VectorXd::Ones(pb.num_ues());
        pb.rebuild_copilot_sets();
        return pb;
    }
};

inline PilotBook assign_pilots_random(int K, int tau_up, std::uint64_t seed,
                                      double rho_p = 100.0) {
    require(K >= 1 && tau_up >= 1, "assign_pilots_random: K and tau_up must be >= 1");
    std::vector<int> a(K);
    if (tau_up >= K) {
        std::iota(a.begin(), a.end(), 0);
    } else {
        Rng rng(derive_seed(seed, 0x51, 0));
        for (int k = 0; k < K; ++k) a[k] = static_cast<int>(rng.uniform_int(tau_up));
    }
    return PilotBook::from_assignment(std::move(a), tau_up, rho_p);
}

// Location-based clustering: ceil(K/tau_up) clusters with farthest-point
// seeding; UEs inside a cluster get mutually orthogonal pilots. Capacity is
// enforced during the assignment step, ties go to the lowest UE index.
inline PilotBook assign_pilots_kmeans(const NetworkGeometry& geo, int K, int tau_up,
                                      double rho_p = 100.0, int max_iterations = 50) {
    require(K >= 1 && tau_up >= 1, "assign_pilots_kmeans: K and tau_up must be >= 1");
    require(static_cast<int>(geo.ue_positions.size()) == K,
            "assign_pilots_kmeans: geometry does not match K");
    const int C = (K + tau_up - 1) / tau_up;
    std::vector<Eigen::Vector2d> centroids;
    centroids.push_back(geo.ue_positions[0]);
    while (static_cast<int>(centroids.size()) < C) {
        int best = -1;
        double best_d = -1.0;
        for (int k = 0; k < K; ++k) {
            double d = 1e300;
            for (const auto& c : centroids) d = std::min(d, (geo.ue_positions[k] - c).norm());
            if (d > best_d + 1e-12) {
                best_d = d;
                best = k;
            }
        }
        centroids.push_back(geo.ue_positions[best]);
    }

    std::vector<int> cluster_of(K, -1);
    for (int it = 0; it < max_iterations; ++it) {
        std::vector<int> load(C, 0);
        std::vector<int> next(K, -1);
        for (int k = 0; k < K; ++k) {
            int best = -1;
            double best_d = 1e300;
            for (int c = 0; c < C; ++c) {
                if (load[c] >= tau_up) continue;
                const double d = (geo.ue_positions[k] - centroids[c]).norm();
                if (d < best_d - 1e-12) {
                    best_d = d;
                    best = c;
                }
            }
            next[k] = best;
            ++load[best];
        }
        const bool changed = next != cluster_of;
        cluster_of = next;
        for (int c = 0; c < C; ++c) {
            Eigen::Vector2d mean = Eigen::Vector2d::Zero();
            int n = 0;
            for (int k = 0; k < K; ++k)
                if (cluster_of[k] == c) {
                    mean += geo.ue_positions[k];
                    ++n;
                }
            if (n > 0) centroids[c] = mean / n;
        }
        if (!changed) break;
    }

    std::vector<int> a(K);
    std::vector<int> used(C, 0);
    for (int k = 0; k < K; ++k) a[k] = used[cluster_of[k]]++;
    return PilotBook::from_assignment(std::move(a), tau_up, rho_p);
}

// Iteratively moves the pilot of the currently worst UE to the candidate pilot
// that maximizes the resulting minimum SE; keeps the current pilot on ties, so
// the minimum SE never decreases. se_evaluator must be a closed-form function
// of the assignment (large-scale statistics only).
inline PilotBook assign_pilots_greedy(const PilotBook& initial, int iterations,
                                      const std::function<VectorXd(const PilotBook&)>& se_evaluator) {
    PilotBook pb = initial;
    for (int it = 0; it < iterations; ++it) {
        VectorXd se = se_evaluator(pb);
        int worst = 0;
        se.minCoeff(&worst);
        const int old_pilot = pb.assignment[worst];
        int best_pilot = old_pilot;
        double best_min = se.minCoeff();
        for (int p = 0; p < pb.tau_up; ++p) {
            if (p == old_pilot) continue;
            PilotBook cand = pb;
            cand.assignment[worst] = p;
            cand.rebuild_copilot_sets();
            const double m = se_evaluator(cand).minCoeff();
            if (m > best_min + 1e-15) {
                best_min = m;
                best_pilot = p;
            }
        }
        if (best_pilot == old_pilot) break;
        pb.assignment[worst] = best_pilot;
        pb.rebuild_copilot_sets();
    }
    return pb;
}

// MMSE channel estimates together with their analytic first/second-order
// statistics. In uncorrelated mode the covariances are diagonal and only the
// per-antenna variances are stored.
struct ChannelEstimate {
    bool correlated = false;
    int antennas = 1;
    MatrixXd beta;                         // copy of the large-scale gains
    MatrixXd gamma;                        // M x K per-antenna estimate variance
    MatrixXd psi;                          // M x tau_up projected-signal variance (uncorrelated)
    std::vector<MatrixXcd> hhat;           // per AP: N x K
    std::vector<MatrixXcd> ybar;           // per AP: N x tau_up projected pilot signals
    std::vector<std::vector<MatrixXcd>> est_cov;  // correlated mode only
    std::vector<std::vector<MatrixXcd>> err_cov;  // correlated mode only

    int num_aps() const { return static_cast<int>(hhat.size()); }
    int num_ues() const { return static_cast<int>(beta.cols()); }

    MatrixXcd est_cov_mat(int m, int k) const {
        if (correlated) return est_cov[m][k];
        return gamma(m, k) * MatrixXcd::Identity(antennas, antennas);
    }
    MatrixXcd err_cov_mat(int m, int k) const {
        if (correlated) return err_cov[m][k];
        return (beta(m, k) - gamma(m, k)) * MatrixXcd::Identity(antennas, antennas);
    }
};

// analytic per-antenna estimate variance without drawing a realization
// (uncorrelated fading): gamma_mk = tau rho varsigma_k beta_mk^2 / psi_mp
inline MatrixXd estimate_gamma(const LargeScaleModel& lsm, const PilotBook& pilots) {
    require(!lsm.correlated, "estimate_gamma: uncorrelated fading only");
    const int M = lsm.num_aps(), K = lsm.num_ues();
    const double tau_rho = pilots.tau_up * pilots.rho_p;
    MatrixXd psi = MatrixXd::Ones(M, pilots.tau_up);
    for (int i = 0; i < K; ++i)
        for (int m = 0; m < M; ++m)
            psi(m, pilots.assignment[i]) += tau_rho * pilots.varsigma(i) * lsm.beta(m, i);
    MatrixXd gamma(M, K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) {
            const double num = tau_rho * pilots.varsigma(k);
            gamma(m, k) = num * lsm.beta(m, k) * lsm.beta(m, k) / psi(m, pilots.assignment[k]);
        }
    return gamma;
}

inline ChannelEstimate mmse_estimate(const LargeScaleModel& lsm, const ChannelRealization& cr,
                                     const PilotBook& pilots, std::uint64_t seed) {
    const int M = lsm.num_aps(), K = lsm.num_ues(), N = lsm.antennas;
    require(pilots.num_ues() == K, "mmse_estimate: pilot book does not match K");
    const double tau_rho = pilots.tau_up * pilots.rho_p;

    ChannelEstimate est;
    est.correlated = lsm.correlated;
    est.antennas = N;
    est.beta = lsm.beta;
    est.gamma = MatrixXd::Zero(M, K);
    est.psi = MatrixXd::Zero(M, pilots.tau_up);
    est.hhat.assign(M, MatrixXcd::Zero(N, K));
    est.ybar.assign(M, MatrixXcd::Zero(N, pilots.tau_up));
    if (lsm.correlated) {
        est.est_cov.assign(M, std::vector<MatrixXcd>(K));
        est.err_cov.assign(M, std::vector<MatrixXcd>(K));
    }

    // UEs sharing a pilot index, from any UE's copilot set
    std::vector<std::vector<int>> on_pilot(pilots.tau_up);
    for (int k = 0; k < K; ++k) on_pilot[pilots.assignment[k]].push_back(k);

    for (int m = 0; m < M; ++m) {
        Rng rng(derive_seed(seed, 0xE57, static_cast<std::uint64_t>(m)));
        for (int p = 0; p < pilots.tau_up; ++p) {
            VectorXcd y = rng.cgauss_vector(N);  // unit-variance projected noise
            for (int i : on_pilot[p])
                y += std::sqrt(tau_rho * pilots.varsigma(i)) * cr.h[m].col(i);
            est.ybar[m].col(p) = y;
        }
        if (!lsm.correlated) {
            for (int p = 0; p < pilots.tau_up; ++p) {
                double psi = 1.0;
                for (int i : on_pilot[p]) psi += tau_rho * pilots.varsigma(i) * lsm.beta(m, i);
                est.psi(m, p) = psi;
            }
            for (int k = 0; k < K; ++k) {
                const int p = pilots.assignment[k];
                const double num = tau_rho * pilots.varsigma(k);
                const double c = std::sqrt(num) * lsm.beta(m, k) / est.psi(m, p);
                est.hhat[m].col(k) = c * est.ybar[m].col(p);
                est.gamma(m, k) = num * lsm.beta(m, k) * lsm.beta(m, k) / est.psi(m, p);
            }
        } else {
            std::vector<Eigen::LLT<MatrixXcd>> phi_llt;
            phi_llt.reserve(pilots.tau_up);
            for (int p = 0; p < pilots.tau_up; ++p) {
                MatrixXcd Phi = MatrixXcd::Identity(N, N);
                for (int i : on_pilot[p]) Phi += tau_rho * pilots.varsigma(i) * lsm.R[m][i];
                est.psi(m, p) = Phi.trace().real() / N;
                phi_llt.emplace_back(Phi);
                if (phi_llt.back().info() != Eigen::Success)
                    throw numerical_domain_error("mmse_estimate: pilot Gram matrix not PD");
            }
            for (int k = 0; k < K; ++k) {
                const int p = pilots.assignment[k];
                const double s = std::sqrt(tau_rho * pilots.varsigma(k));
                est.hhat[m].col(k) = s * lsm.R[m][k] * phi_llt[p].solve(est.ybar[m].col(p));
                MatrixXcd Omega =
                    (tau_rho * pilots.varsigma(k)) * lsm.R[m][k] * phi_llt[p].solve(lsm.R[m][k]);
                est.est_cov[m][k] = Omega;
                est.err_cov[m][k] = lsm.R[m][k] - Omega;
                est.gamma(m, k) = Omega.trace().real() / N;
            }
        }
    }
    return est;
}

// Cosine similarity of estimates for every co-pilot pair at every AP; only
// meaningful in uncorrelated mode where the estimates are exactly parallel.
struct CopilotCollinearity {
    int ap, ue_a, ue_b;
    double cosine;   // |<a,b>| / (|a||b|)
    bool degenerate; // a zero-norm estimate was involved
};

inline std::vector<CopilotCollinearity> contamination_collinearity(const ChannelEstimate& est,
                                                                   const PilotBook& pilots) {
    std::vector<CopilotCollinearity> out;
    const int M = est.num_aps(), K = est.num_ues();
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            for (int t : pilots.copilot[k]) {
                if (t <= k) continue;
                const double na = est.hhat[m].col(k).norm();
                const double nb = est.hhat[m].col(t).norm();
                CopilotCollinearity c{m, k, t, 0.0, false};
                if (na == 0.0 || nb == 0.0)
                    c.degenerate = true;
                else
                    c.cosine = std::abs((cxd)(est.hhat[m].col(k).adjoint() * est.hhat[m].col(t))(0)) /
                               (na * nb);
                out.push_back(c);
            }
        }
    }
    return out;
}

}  // namespace cfmimo

#endif
