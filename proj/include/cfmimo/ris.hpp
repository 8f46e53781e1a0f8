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

#ifndef CFMIMO_RIS_HPP
#define CFMIMO_RIS_HPP

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/training.hpp"

namespace cfmimo {

// Single reflecting surface assisting single-antenna APs. R_ap[m] and
// R_ue[k] are the element correlation matrices of the AP-RIS and RIS-UE
// segments; phases hold the per-element reflection angles.
struct RISModel {
    int n_elements = 0;
    VectorXd phases;                 // theta_n in [-pi, pi]
    std::vector<MatrixXcd> R_ap;     // per AP
    std::vector<MatrixXcd> R_ue;     // per UE

    int num_aps() const { return static_cast<int>(R_ap.size()); }
    int num_ues() const { return static_cast<int>(R_ue.size()); }

    VectorXcd phase_vector() const {
        VectorXcd v(n_elements);
        for (int n = 0; n < n_elements; ++n) v(n) = std::polar(1.0, phases(n));
        return v;
    }
};

// isotropic-scattering element correlation on a square grid with the given
// element spacing (wavelengths): [R]_ab = gain * sinc(2 d_ab / lambda)
inline MatrixXcd ris_element_correlation(int n_elements, double spacing_wavelengths, double gain) {
    const int G = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_elements))));
    MatrixXcd R(n_elements, n_elements);
    auto pos = [&](int n) {
        return Eigen::Vector2d(spacing_wavelengths * (n % G), spacing_wavelengths * (n / G));
    };
    auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x); };
    for (int a = 0; a < n_elements; ++a)
        for (int b = 0; b < n_elements; ++b)
            R(a, b) = gain * sinc(2.0 * (pos(a) - pos(b)).norm());
    return R;
}

struct RisEstimate {
    MatrixXd delta;  // beta + tr(Theta)
    MatrixXd c;      // linear-MMSE coefficient
    MatrixXd gamma;  // estimate variance
    MatrixXd nmse;   // 1 - gamma / delta
    std::vector<std::vector<MatrixXcd>> Theta;  // per (m, k)
};

// Theta_mk = Phi^H R_m Phi R~_k and the linear MMSE statistics of the
// aggregated (direct + reflected) channel
inline RisEstimate ris_estimate(const RISModel& ris, const MatrixXd& beta_direct,
                                const PilotBook& pilots) {
    const int M = ris.num_aps(), K = ris.num_ues();
    require(static_cast<int>(beta_direct.rows()) == M && static_cast<int>(beta_direct.cols()) == K,
            "ris_estimate: beta_direct shape mismatch");
    RisEstimate e;
    e.delta = MatrixXd::Zero(M, K);
    e.c = MatrixXd::Zero(M, K);
    e.gamma = MatrixXd::Zero(M, K);
    e.nmse = MatrixXd::Zero(M, K);
    e.Theta.assign(M, std::vector<MatrixXcd>(K));

    const VectorXcd phi = ris.phase_vector();
    for (int m = 0; m < M; ++m) {
        const MatrixXcd A = phi.conjugate().asDiagonal() * ris.R_ap[m] * phi.asDiagonal();
        for (int k = 0; k < K; ++k) {
            e.Theta[m][k] = A * ris.R_ue[k];
            e.delta(m, k) = beta_direct(m, k) + e.Theta[m][k].trace().real();
        }
    }
    const double tr = pilots.tau_up * pilots.rho_p;
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            double den = 1.0;
            for (int kp : pilots.copilot[k]) den += tr * e.delta(m, kp);
            e.c(m, k) = std::sqrt(tr) * e.delta(m, k) / den;
            e.gamma(m, k) = std::sqrt(tr) * e.delta(m, k) * e.c(m, k);
            e.nmse(m, k) = e.delta(m, k) > 0.0 ? 1.0 - e.gamma(m, k) / e.delta(m, k) : 0.0;
        }
    }
    return e;
}

inline double ris_total_nmse(const RISModel& ris, const MatrixXd& beta_direct,
                             const PilotBook& pilots) {
    return ris_estimate(ris, beta_direct, pilots).nmse.sum();
}

enum class RisPhaseMode { EQUAL, RANDOM, COORDINATE_DESCENT };

// Phase-shift selection against the total-NMSE objective. EQUAL sets all
// elements to one angle (optimal without direct links); COORDINATE_DESCENT
// sweeps each element over a 64-point grid until no sweep improves.
inline VectorXd ris_phase_design(RISModel ris, const MatrixXd& beta_direct,
                                 const PilotBook& pilots, RisPhaseMode mode,
                                 std::uint64_t seed = 0, int grid_points = 64,
                                 int max_sweeps = 20) {
    const int N = ris.n_elements;
    switch (mode) {
        case RisPhaseMode::EQUAL:
            return VectorXd::Zero(N);
        case RisPhaseMode::RANDOM: {
            Rng rng(derive_seed(seed, 0x415, 0));
            VectorXd ph(N);
            for (int n = 0; n < N; ++n) ph(n) = rng.uniform(-M_PI, M_PI);
            return ph;
        }
        case RisPhaseMode::COORDINATE_DESCENT: {
            ris.phases = VectorXd::Zero(N);
            double best = ris_total_nmse(ris, beta_direct, pilots);
            for (int sweep = 0; sweep < max_sweeps; ++sweep) {
                bool improved = false;
                for (int n = 0; n < N; ++n) {
                    const double keep = ris.phases(n);
                    double best_angle = keep;
                    for (int gpt = 0; gpt < grid_points; ++gpt) {
                        const double angle = -M_PI + 2.0 * M_PI * gpt / grid_points;
                        ris.phases(n) = angle;
                        const double v = ris_total_nmse(ris, beta_direct, pilots);
                        if (v < best - 1e-12) {
                            best = v;
                            best_angle = angle;
                            improved = true;
                        }
                    }
                    ris.phases(n) = best_angle;
                }
                if (!improved) break;
            }
            return ris.phases;
        }
    }
    throw invalid_argument_error("ris_phase_design: unknown mode");
}

// Closed-form UL/DL SINRs of the RIS-assisted network with MR processing.
// All trace cross-terms tr(Theta_a Theta_b) are tabulated once; the paired
// (m, m') sums are real by conjugate symmetry.
struct RisSeResult {
    VectorXd ul_se, dl_se;
    double sum_ul = 0.0, sum_dl = 0.0;
};

inline RisSeResult ris_se(const RISModel& ris, const RisEstimate& e, const PilotBook& pilots,
                          const MatrixXd& eta, const VectorXd& varsigma, double rho_u,
                          double rho_d, double prelog_ul, double prelog_dl) {
    const int M = ris.num_aps(), K = ris.num_ues();
    const double trp = pilots.tau_up * pilots.rho_p;

    // T[(m,k)][(m',k'')] = tr(Theta_mk Theta_m'k'')
    std::vector<std::vector<cxd>> T(M * K, std::vector<cxd>(M * K));
    for (int a = 0; a < M * K; ++a)
        for (int b = 0; b < M * K; ++b)
            T[a][b] = (e.Theta[a / K][a % K] * e.Theta[b / K][b % K]).trace();
    auto tid = [K](int m, int k) { return m * K + k; };

    RisSeResult out;
    out.ul_se = VectorXd::Zero(K);
    out.dl_se = VectorXd::Zero(K);

    for (int k = 0; k < K; ++k) {
        // uplink
        double num = rho_u * varsigma(k) * std::pow(e.gamma.col(k).sum(), 2);
        double den = 0.0;
        for (int kp = 0; kp < K; ++kp)
            for (int m = 0; m < M; ++m)
                den += rho_u * varsigma(kp) * e.gamma(m, k) * e.delta(m, kp);
        double cross = 0.0;
        for (int kp = 0; kp < K; ++kp)
            for (int kpp : pilots.copilot[k])
                for (int m = 0; m < M; ++m)
                    for (int mp = 0; mp < M; ++mp)
                        cross += varsigma(kp) * e.c(m, k) * e.c(mp, k) *
                                 (T[tid(m, kp)][tid(mp, kpp)]).real();
        den += trp * rho_u * cross;
        den += e.gamma.col(k).sum();
        for (int kp : pilots.copilot[k]) {
            double sq = 0.0;
            for (int m = 0; m < M; ++m)
                sq += varsigma(kp) * e.c(m, k) * e.c(m, k) * (T[tid(m, kp)][tid(m, kp)]).real();
            den += trp * rho_u * sq;
        }
        for (int kp : pilots.copilot[k]) {
            if (kp == k) continue;
            double coh = 0.0;
            for (int m = 0; m < M; ++m) coh += e.c(m, k) * e.delta(m, kp);
            den += trp * rho_u * varsigma(kp) * coh * coh;
        }
        out.ul_se(k) = prelog_ul * log2_1p(den > 0.0 ? num / den : 0.0);

        // downlink
        double numd = 0.0;
        for (int m = 0; m < M; ++m) numd += std::sqrt(std::max(eta(m, k), 0.0)) * e.gamma(m, k);
        numd = rho_d * numd * numd;
        double dend = 1.0;
        for (int kp = 0; kp < K; ++kp)
            for (int m = 0; m < M; ++m)
                dend += rho_d * eta(m, kp) * e.gamma(m, kp) * e.delta(m, k);
        double crossd = 0.0;
        for (int kp = 0; kp < K; ++kp)
            for (int kpp : pilots.copilot[kp])
                for (int m = 0; m < M; ++m)
                    for (int mp = 0; mp < M; ++mp)
                        crossd += std::sqrt(std::max(eta(m, kp) * eta(mp, kp), 0.0)) *
                                  e.c(m, kp) * e.c(mp, kp) * (T[tid(m, k)][tid(mp, kpp)]).real();
        dend += trp * rho_d * crossd;
        for (int kp : pilots.copilot[k]) {
            double sq = 0.0;
            for (int m = 0; m < M; ++m)
                sq += eta(m, kp) * e.c(m, kp) * e.c(m, kp) * (T[tid(m, k)][tid(m, k)]).real();
            dend += trp * rho_d * sq;
        }
        for (int kp : pilots.copilot[k]) {
            if (kp == k) continue;
            double coh = 0.0;
            for (int m = 0; m < M; ++m)
                coh += std::sqrt(std::max(eta(m, kp), 0.0)) * e.c(m, kp) * e.delta(m, k);
            dend += trp * rho_d * coh * coh;
        }
        out.dl_se(k) = prelog_dl * log2_1p(numd / dend);
    }
    out.sum_ul = out.ul_se.sum();
    out.sum_dl = out.dl_se.sum();
    return out;
}

// Bernoulli blocking of the direct links: beta_mk = beta_bar_mk with
// probability p_direct, else 0
inline MatrixXd ris_blocking(const MatrixXd& beta_bar, double p_direct, std::uint64_t seed) {
    require(p_direct >= 0.0 && p_direct <= 1.0, "ris_blocking: p_direct must be in [0,1]");
    MatrixXd beta = beta_bar;
    Rng rng(derive_seed(seed, 0xB10C, 0));
    for (int m = 0; m < beta.rows(); ++m)
        for (int k = 0; k < beta.cols(); ++k)
            if (rng.uniform() > p_direct) beta(m, k) = 0.0;
    return beta;
}

}  // namespace cfmimo

#endif
