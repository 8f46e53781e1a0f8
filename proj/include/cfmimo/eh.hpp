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

#ifndef CFMIMO_EH_HPP
#define CFMIMO_EH_HPP

#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

// Nonlinear rectifier model: logistic transfer with the zero-input offset
// removed, saturating at phi watts DC.
struct EHModelParams {
    double phi = 24e-3;  // max DC output, watts
    double xi = 150.0;
    double chi = 0.014;

    double omega() const { return 1.0 / (1.0 + std::exp(xi * chi)); }
};

inline double eh_harvested(double e_in_watts, const EHModelParams& p) {
    require(e_in_watts >= 0.0, "eh_harvested: negative input power");
    const double psi = p.phi / (1.0 + std::exp(-p.xi * (e_in_watts - p.chi)));
    const double omega = p.omega();
    return (psi - p.phi * omega) / (1.0 - omega);
}

// Network statistics for the mixed information/energy service: AP mode bits
// choose between serving the Kd information UEs (partial ZF) or the L energy
// UEs (protective MR).
struct EhScalars {
    MatrixXd beta_iu, gamma_iu;  // M x Kd
    MatrixXd beta_eu, gamma_eu;  // M x L
    int N = 4;
    double rho_d = 1.0;       // normalized DL SNR
    double p_d_watts = 1.0;   // absolute DL power for RF energy accounting
    int num_aps() const { return static_cast<int>(beta_iu.rows()); }
    int num_iu() const { return static_cast<int>(beta_iu.cols()); }
    int num_eu() const { return static_cast<int>(beta_eu.cols()); }
};

// Closed-form DL SE of information UE k under partial ZF at the information
// APs; both AP groups leak estimation-error interference beta - gamma.
inline VectorXd eh_iu_se(const std::vector<int>& a, const MatrixXd& etaI, const MatrixXd& etaE,
                         const EhScalars& s, double prelog) {
    const int M = s.num_aps(), Kd = s.num_iu(), L = s.num_eu();
    VectorXd se(Kd);
    for (int k = 0; k < Kd; ++k) {
        double num = 0.0;
        for (int m = 0; m < M; ++m)
            num += std::sqrt(a[m] * etaI(m, k) * s.gamma_iu(m, k));
        num = s.rho_d * (s.N - Kd) * num * num;
        double den = 1.0;
        for (int m = 0; m < M; ++m) {
            const double err = s.beta_iu(m, k) - s.gamma_iu(m, k);
            for (int kp = 0; kp < Kd; ++kp) den += s.rho_d * a[m] * etaI(m, kp) * err;
            for (int l = 0; l < L; ++l) den += s.rho_d * (1 - a[m]) * etaE(m, l) * err;
        }
        se(k) = prelog * log2_1p(num / den);
    }
    return se;
}

// Expected received RF power at energy UE l (watts): coherent protective-MR
// gain from its own beam plus non-coherent pickup from every other beam.
inline double eh_expected_rf(const std::vector<int>& a, const MatrixXd& etaI,
                             const MatrixXd& etaE, const EhScalars& s, int l) {
    const int M = s.num_aps(), Kd = s.num_iu(), L = s.num_eu();
    double p = 0.0;
    for (int m = 0; m < M; ++m) {
        if (a[m] == 0) {
            // own beam: coherent gain plus estimation-error pickup
            p += etaE(m, l) * ((s.N - Kd) * s.gamma_eu(m, l) +
                               (s.beta_eu(m, l) - s.gamma_eu(m, l)));
            for (int lp = 0; lp < L; ++lp)
                if (lp != l) p += etaE(m, lp) * s.beta_eu(m, l);
        } else {
            for (int k = 0; k < Kd; ++k) p += etaI(m, k) * s.beta_eu(m, l);
        }
    }
    return s.p_d_watts * p;
}

// Per-realization received RF power, averaged over fading draws when
// computing E{Phi}. The coherent part is modelled as Gamma(N - Kd, gamma)
// (protective-MR beam against the estimate), the rest as exponential pickup.
inline double eh_mean_harvested(const std::vector<int>& a, const MatrixXd& etaI,
                                const MatrixXd& etaE, const EhScalars& s,
                                const EHModelParams& params, int l, long trials,
                                std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0xEA, static_cast<std::uint64_t>(l)));
    const int M = s.num_aps(), Kd = s.num_iu(), L = s.num_eu();
    double acc = 0.0;
    for (long t = 0; t < trials; ++t) {
        double p = 0.0;
        for (int m = 0; m < M; ++m) {
            if (a[m] == 0) {
                // own beam: estimate part concentrates over N-Kd dimensions,
                // the estimation error adds an independent exponential pickup
                double coh = 0.0;
                for (int d = 0; d < s.N - Kd; ++d) coh += std::norm(rng.cgauss());
                p += etaE(m, l) * s.gamma_eu(m, l) * coh;
                p += etaE(m, l) * (s.beta_eu(m, l) - s.gamma_eu(m, l)) * std::norm(rng.cgauss());
                for (int lp = 0; lp < L; ++lp)
                    if (lp != l)
                        p += etaE(m, lp) * s.beta_eu(m, l) * std::norm(rng.cgauss());
            } else {
                for (int k = 0; k < Kd; ++k)
                    p += etaI(m, k) * s.beta_eu(m, l) * std::norm(rng.cgauss());
            }
        }
        acc += eh_harvested(s.p_d_watts * p, params);
    }
    return acc / static_cast<double>(trials);
}

enum class EhStrategy { EXHAUSTIVE, RANDOM_OPTIMIZED, RANDOM_EQUAL, SPLIT_ORTHOGONAL };

struct EhOutcome {
    std::vector<int> a;
    MatrixXd etaI, etaE;
    VectorXd se;             // per IU
    VectorXd harvested;      // per EU, time-averaged DC watts
    double sum_harvested = 0.0;
    bool feasible = true;
    double duty = 1.0;       // fraction of the data phase spent harvesting
};

namespace detail {

// equal power share per served UE at each AP, gated by the mode bit
inline void eh_equal_power(const std::vector<int>& a, const EhScalars& s, MatrixXd* etaI,
                           MatrixXd* etaE) {
    const int M = s.num_aps();
    *etaI = MatrixXd::Zero(M, s.num_iu());
    *etaE = MatrixXd::Zero(M, s.num_eu());
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < s.num_iu(); ++k) (*etaI)(m, k) = a[m] / double(s.num_iu());
        for (int l = 0; l < s.num_eu(); ++l) (*etaE)(m, l) = (1 - a[m]) / double(s.num_eu());
    }
}

// proxy objective for the inner power search: transfer function evaluated at
// the expected RF power, with soft floor penalties
inline double eh_proxy_objective(const std::vector<int>& a, const MatrixXd& etaI,
                                 const MatrixXd& etaE, const EhScalars& s,
                                 const EHModelParams& params, const VectorXd& floors) {
    double v = 0.0;
    for (int l = 0; l < s.num_eu(); ++l) {
        const double h = eh_harvested(eh_expected_rf(a, etaI, etaE, s, l), params);
        v += h;
        if (h < floors(l)) v -= 1e3 * (floors(l) - h);
    }
    return v;
}

// redistribute each energy AP's budget across EUs by coordinate ascent on the
// proxy objective; starts from the equal split, so it never does worse
inline void eh_optimize_energy_split(const std::vector<int>& a, const MatrixXd& etaI,
                                     MatrixXd* etaE, const EhScalars& s,
                                     const EHModelParams& params, const VectorXd& floors) {
    const int M = s.num_aps(), L = s.num_eu();
    auto objective = [&](const MatrixXd& ee) {
        return eh_proxy_objective(a, etaI, ee, s, params, floors);
    };
    const int grid = 10;
    for (int sweep = 0; sweep < 6; ++sweep) {
        bool improved = false;
        for (int m = 0; m < M; ++m) {
            if (a[m] == 1 || L < 2) continue;
            for (int l1 = 0; l1 < L; ++l1)
                for (int l2 = l1 + 1; l2 < L; ++l2) {
                    const double tot = (*etaE)(m, l1) + (*etaE)(m, l2);
                    if (tot <= 0.0) continue;
                    double best = objective(*etaE);
                    double b1 = (*etaE)(m, l1);
                    for (int gpt = 0; gpt <= grid; ++gpt) {
                        MatrixXd cand = *etaE;
                        cand(m, l1) = tot * gpt / grid;
                        cand(m, l2) = tot - cand(m, l1);
                        const double v = objective(cand);
                        if (v > best * (1.0 + 1e-12) + 1e-300) {
                            best = v;
                            b1 = cand(m, l1);
                            improved = true;
                        }
                    }
                    (*etaE)(m, l1) = b1;
                    (*etaE)(m, l2) = tot - b1;
                }
        }
        if (!improved) break;
    }
}

}  // namespace detail

// Evaluate one mode assignment under the chosen power rule. optimize_power
// redistributes each energy AP's budget across the EUs (grid-refined
// coordinate ascent); the information budget stays at full equal shares,
// which is simultaneously throughput- and harvest-favorable.
inline EhOutcome eh_evaluate_modes(const std::vector<int>& a, const EhScalars& s,
                                   const EHModelParams& params, double se_floor,
                                   const VectorXd& he_floors, double prelog, bool optimize_power,
                                   long energy_trials, std::uint64_t seed, double duty = 1.0) {
    EhOutcome out;
    out.a = a;
    out.duty = duty;
    detail::eh_equal_power(a, s, &out.etaI, &out.etaE);
    if (optimize_power)
        detail::eh_optimize_energy_split(a, out.etaI, &out.etaE, s, params, he_floors);

    out.se = eh_iu_se(a, out.etaI, out.etaE, s, prelog);
    out.harvested = VectorXd::Zero(s.num_eu());
    for (int l = 0; l < s.num_eu(); ++l)
        out.harvested(l) =
            duty * eh_mean_harvested(a, out.etaI, out.etaE, s, params, l, energy_trials, seed);
    out.sum_harvested = out.harvested.sum();
    out.feasible = (out.se.array() >= se_floor - 1e-9).all() &&
                   (out.harvested.array() >= duty * he_floors.array() - 1e-15).all();
    return out;
}

// AP mode selection strategies; EXHAUSTIVE enumerates the 2^M assignments
// with the optimized inner power rule and keeps the best feasible one.
inline EhOutcome eh_mode_selection(const EhScalars& s, const EHModelParams& params,
                                   EhStrategy strategy, double se_floor, const VectorXd& he_floors,
                                   double prelog, long energy_trials, std::uint64_t seed) {
    const int M = s.num_aps();
    if (s.num_eu() == 0) {
        // nothing to harvest; the SE floors drive everything, serve with all APs
        std::vector<int> all_i(M, 1);
        return eh_evaluate_modes(all_i, s, params, se_floor, he_floors, prelog, false,
                                 energy_trials, seed);
    }
    switch (strategy) {
        case EhStrategy::EXHAUSTIVE: {
            require(M <= 12, "eh_mode_selection: M too large for enumeration (max 12)");
            // enumerate on the deterministic proxy, report the winner by the
            // Monte Carlo estimate of E{Phi}
            std::vector<int> best_a;
            double best_proxy = 0.0;
            bool found = false;
            for (unsigned mask = 0; mask < (1u << M); ++mask) {
                std::vector<int> a(M);
                for (int m = 0; m < M; ++m) a[m] = (mask >> m) & 1u;
                MatrixXd etaI, etaE;
                detail::eh_equal_power(a, s, &etaI, &etaE);
                detail::eh_optimize_energy_split(a, etaI, &etaE, s, params, he_floors);
                if (!(eh_iu_se(a, etaI, etaE, s, prelog).array() >= se_floor - 1e-9).all())
                    continue;
                bool meets = true;
                double proxy = 0.0;
                for (int l = 0; l < s.num_eu(); ++l) {
                    const double h = eh_harvested(eh_expected_rf(a, etaI, etaE, s, l), params);
                    proxy += h;
                    if (h < he_floors(l)) meets = false;
                }
                if (!meets) continue;
                if (!found || proxy > best_proxy) {
                    best_proxy = proxy;
                    best_a = a;
                    found = true;
                }
            }
            if (!found)
                throw infeasible_problem_error("eh_mode_selection: no feasible mode assignment");
            return eh_evaluate_modes(best_a, s, params, se_floor, he_floors, prelog, true,
                                     energy_trials, seed);
        }
        case EhStrategy::RANDOM_OPTIMIZED:
        case EhStrategy::RANDOM_EQUAL: {
            Rng rng(derive_seed(seed, 0xE5, 1));
            std::vector<int> a(M);
            for (int m = 0; m < M; ++m) a[m] = rng.uniform() < 0.5 ? 1 : 0;
            return eh_evaluate_modes(a, s, params, se_floor, he_floors, prelog,
                                     strategy == EhStrategy::RANDOM_OPTIMIZED, energy_trials,
                                     seed);
        }
        case EhStrategy::SPLIT_ORTHOGONAL: {
            // all APs serve both roles over two equal orthogonal sub-frames
            std::vector<int> all_i(M, 1), all_e(M, 0);
            MatrixXd etaI, etaE, dummyI, dummyE;
            detail::eh_equal_power(all_i, s, &etaI, &dummyE);
            detail::eh_equal_power(all_e, s, &dummyI, &etaE);
            EhOutcome out;
            out.a = all_i;
            out.etaI = etaI;
            out.etaE = etaE;
            out.duty = 0.5;
            out.se = 0.5 * eh_iu_se(all_i, etaI, etaE, s, prelog);
            out.harvested = VectorXd::Zero(s.num_eu());
            for (int l = 0; l < s.num_eu(); ++l)
                out.harvested(l) = 0.5 * eh_mean_harvested(all_e, etaI, etaE, s, params, l,
                                                           energy_trials, seed);
            out.sum_harvested = out.harvested.sum();
            out.feasible = (out.se.array() >= se_floor - 1e-9).all();
            return out;
        }
    }
    throw invalid_argument_error("eh_mode_selection: unknown strategy");
}

}  // namespace cfmimo

#endif
