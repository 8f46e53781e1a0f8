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

#ifndef CFMIMO_ENGINES_HPP
#define CFMIMO_ENGINES_HPP

#include <string>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/dlink.hpp"
#include "cfmimo/eh.hpp"
#include "cfmimo/lemmas.hpp"
#include "cfmimo/nafd.hpp"
#include "cfmimo/noma.hpp"
#include "cfmimo/pls.hpp"
#include "cfmimo/powerctrl.hpp"
#include "cfmimo/ris.hpp"
#include "cfmimo/ulink.hpp"

namespace cfmimo {

struct ResultRow {
    long seed = 0;
    std::string scheme;
    std::string metric;
    std::vector<double> values;
    double sum = 0.0;
    double min = 0.0;
};

inline ResultRow make_row(long seed, std::string scheme, std::string metric, const VectorXd& v) {
    ResultRow r;
    r.seed = seed;
    r.scheme = std::move(scheme);
    r.metric = std::move(metric);
    r.values.assign(v.data(), v.data() + v.size());
    r.sum = v.size() ? v.sum() : 0.0;
    r.min = v.size() ? v.minCoeff() : 0.0;
    return r;
}

namespace engines {

inline LargeScaleModel make_lsm(const ExperimentConfig& cfg, const NetworkGeometry& geo,
                                std::uint64_t seed) {
    LargeScaleModel lsm;
    lsm.beta = three_slope_beta(geo, ThreeSlopeParams{}, cfg.shadow_std_db,
                                derive_seed(seed, 0x10, 0));
    lsm.antennas = cfg.N;
    lsm.noise_power = cfg.noise_power_watts();
    return lsm;
}

// ---------------------------------------------------------------- downlink
inline std::vector<ResultRow> run_dl(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0xD100, seed);
    auto geo = drop_network(cfg.M, cfg.K, cfg.area_side, derive_seed(s0, 1, 0));
    geo.wrap_around = cfg.wrap_around;
    auto lsm = make_lsm(cfg, geo, s0);
    auto pilots = assign_pilots_random(cfg.K, cfg.tau_up, derive_seed(s0, 2, 0), cfg.rho(cfg.p_p));
    const double prelog = static_cast<double>(cfg.tau_d_eff()) / cfg.tau_c;
    const double rho_d = cfg.rho(cfg.p_d);
    const MatrixXd gamma = estimate_gamma(lsm, pilots);

    auto schemes = cfg.schemes.empty() ? std::vector<std::string>{"cb", "cb_closed"} : cfg.schemes;
    for (const auto& name : schemes) {
        if (name == "cb_closed") {
            MatrixXd norms = (gamma.array() * cfg.N).matrix();
            MatrixXd eta = uniform_full_power_eta(norms);
            auto rep = dl_se_closed_cb(lsm.beta, gamma, eta, rho_d, cfg.N, prelog);
            rows.push_back(make_row(seed, name, "dl_se", rep.se));
            continue;
        }
        PrecoderScheme ps;
        if (name == "cb") ps = PrecoderScheme::CB;
        else if (name == "ncb") ps = PrecoderScheme::NCB;
        else if (name == "ecb") ps = PrecoderScheme::ECB;
        else if (name == "fzf") ps = PrecoderScheme::FZF;
        else if (name == "pzf") ps = PrecoderScheme::PZF;
        else if (name == "ppzf") ps = PrecoderScheme::PPZF;
        else if (name == "czf") ps = PrecoderScheme::CZF;
        else throw config_error("dl: unknown scheme '" + name + "'");

        PrecoderGroups groups;
        if (ps == PrecoderScheme::PZF || ps == PrecoderScheme::PPZF)
            groups = group_by_largescale(lsm.beta, cfg.strong_fraction, cfg.N - 1);
        auto factory = make_precoder_factory(ps, groups);

        MatrixXd norms;
        if (ps == PrecoderScheme::CB)
            norms = (gamma.array() * cfg.N).matrix();
        else if (ps == PrecoderScheme::CZF)
            norms = estimate_precoder_norms(factory, lsm, pilots, 50, derive_seed(s0, 3, 0));
        else {
            auto cr = draw_channels(lsm, derive_seed(s0, 4, 0));
            auto est = mmse_estimate(lsm, cr, pilots, derive_seed(s0, 5, 0));
            norms = factory(est, pilots).norm_sq;
        }
        DLPowerAllocation power{uniform_full_power_eta(norms), rho_d};
        auto res = dl_se_montecarlo(factory, lsm, pilots, power, cfg.trials,
                                    derive_seed(s0, 6, 0), prelog);
        rows.push_back(make_row(seed, name, "dl_se", res.report.se));
    }
    return rows;
}

// ------------------------------------------------------------------ uplink
inline std::vector<ResultRow> run_ul(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x0100, seed);
    auto geo = drop_network(cfg.M, cfg.K, cfg.area_side, derive_seed(s0, 1, 0));
    auto lsm = make_lsm(cfg, geo, s0);
    auto pilots = assign_pilots_random(cfg.K, cfg.tau_up, derive_seed(s0, 2, 0), cfg.rho(cfg.p_p));
    const double prelog = static_cast<double>(cfg.tau_u_eff()) / cfg.tau_c;
    const double rho_u = cfg.rho(cfg.p_u);
    const VectorXd varsigma = VectorXd::Ones(cfg.K);
    auto serving = ServingSets::all_serve(cfg.M, cfg.K);

    auto mo = ul_moments_montecarlo(CombinerScheme::MR, lsm, pilots, serving, rho_u, varsigma,
                                    cfg.trials, derive_seed(s0, 3, 0));
    rows.push_back(make_row(seed, "l1_mr", "ul_se", ul_se_level1(mo, rho_u, varsigma, prelog).se));
    rows.push_back(make_row(seed, "l2_mr", "ul_se", ul_se_level2(mo, rho_u, varsigma, prelog).se));
    auto w = lsfd_optimal(mo, rho_u, varsigma);
    rows.push_back(
        make_row(seed, "l3_mr_lsfd", "ul_se", ul_se_level3(mo, w, rho_u, varsigma, prelog).se));
    rows.push_back(make_row(seed, "l4_cmmse", "ul_se",
                            ul_se_level4(CombinerScheme::CMMSE, lsm, pilots, rho_u, varsigma,
                                         cfg.trials, derive_seed(s0, 3, 0), prelog)
                                .se));
    return rows;
}

// ------------------------------------------------------------------- NAFD
inline NafdScalars make_nafd_scalars(const ExperimentConfig& cfg, std::uint64_t s0, int N,
                                     NetworkGeometry* geo_out = nullptr) {
    const int Kd = cfg.K_d, Ku = cfg.K_u;
    auto geo = drop_network(cfg.M, Kd + Ku, cfg.area_side, derive_seed(s0, 1, 0));
    MatrixXd beta =
        three_slope_beta(geo, ThreeSlopeParams{}, cfg.shadow_std_db, derive_seed(s0, 2, 0));

    NafdScalars s;
    s.N = N;
    s.rho_u = cfg.rho(cfg.p_u);
    s.rho_d = cfg.rho(cfg.p_d);
    s.beta_dl = beta.leftCols(Kd);
    s.beta_ul = beta.rightCols(Ku);
    const double trp = cfg.tau_up * cfg.rho(cfg.p_p);
    auto gam = [&](const MatrixXd& b) {
        return (trp * b.array().square() / (trp * b.array() + 1.0)).matrix();
    };
    s.gamma_dl = gam(s.beta_dl);
    s.gamma_ul = gam(s.beta_ul);

    // UE-to-UE cross gains over the same propagation model
    s.beta_du = MatrixXd::Zero(Kd, Ku);
    Rng rng(derive_seed(s0, 3, 0));
    ThreeSlopeParams tsp;
    for (int k = 0; k < Kd; ++k)
        for (int l = 0; l < Ku; ++l) {
            const double d = geo.distance(geo.ue_positions[k], geo.ue_positions[Kd + l]);
            double pl = tsp.path_loss_dB(d);
            if (cfg.shadow_std_db > 0.0 && tsp.in_far_slope(d)) pl += cfg.shadow_std_db * rng.gauss();
            s.beta_du(k, l) = db_to_linear(pl);
        }
    // inter-AP gains; the diagonal puts the residual loop sigma_si_db above
    // the noise floor at full DL power
    s.beta_ap = MatrixXd::Zero(cfg.M, cfg.M);
    for (int m = 0; m < cfg.M; ++m)
        for (int i = 0; i < cfg.M; ++i) {
            if (m == i) {
                s.beta_ap(m, m) = db_to_linear(cfg.sigma_si_db) / s.rho_d;
                continue;
            }
            const double d = geo.distance(geo.ap_positions[m], geo.ap_positions[i]);
            double pl = tsp.path_loss_dB(d);
            if (cfg.shadow_std_db > 0.0 && tsp.in_far_slope(d)) pl += cfg.shadow_std_db * rng.gauss();
            s.beta_ap(m, i) = db_to_linear(pl);
        }
    if (geo_out) *geo_out = geo;
    return s;
}

inline std::vector<ResultRow> run_nafd(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x4AFD, seed);
    const NafdScalars s = make_nafd_scalars(cfg, s0, cfg.N);
    const double prelog = static_cast<double>(cfg.tau_c - cfg.tau_up) / cfg.tau_c;
    const double prelog_half = 0.5 * prelog;

    auto schemes = cfg.schemes.empty()
                       ? std::vector<std::string>{"greedy", "random", "fd", "hd"}
                       : cfg.schemes;
    for (const auto& name : schemes) {
        if (name == "exhaustive") {
            auto best = nafd_exhaustive_modes(s, prelog);
            auto st = nafd_fixed_power_state(s, best.a, best.b);
            auto [ul, dl] = nafd_se(st, s, prelog);
            VectorXd all(ul.size() + dl.size());
            all << ul, dl;
            rows.push_back(make_row(seed, name, "se", all));
        } else if (name == "greedy") {
            auto [a, b] = nafd_greedy_modes(s, prelog);
            auto st = nafd_fixed_power_state(s, a, b);
            auto [ul, dl] = nafd_se(st, s, prelog);
            VectorXd all(ul.size() + dl.size());
            all << ul, dl;
            rows.push_back(make_row(seed, name, "se", all));
        } else if (name == "random") {
            Rng rng(derive_seed(s0, 9, 0));
            std::vector<int> a(cfg.M), b(cfg.M);
            for (int m = 0; m < cfg.M; ++m) {
                a[m] = rng.uniform() < 0.5 ? 1 : 0;
                b[m] = 1 - a[m];
            }
            auto st = nafd_fixed_power_state(s, a, b);
            auto [ul, dl] = nafd_se(st, s, prelog);
            VectorXd all(ul.size() + dl.size());
            all << ul, dl;
            rows.push_back(make_row(seed, name, "se", all));
        } else if (name == "fd") {
            // antenna-number-preserved full duplex: N_t = N_r = N/2 per AP
            NafdScalars fd = s;
            const int half = std::max(cfg.N / 2, 1);
            fd.N = half;
            MatrixXd theta = MatrixXd::Zero(cfg.M, cfg.K_d);
            for (int m = 0; m < cfg.M; ++m)
                for (int k = 0; k < cfg.K_d; ++k)
                    theta(m, k) = 1.0 / std::sqrt(half * cfg.K_d * fd.gamma_dl(m, k));
            auto [ul, dl] = nafd_fd_se(fd, theta, VectorXd::Ones(cfg.K_u),
                                       MatrixXd::Ones(cfg.M, cfg.K_u), prelog);
            VectorXd all(ul.size() + dl.size());
            all << ul, dl;
            rows.push_back(make_row(seed, name, "se", all));
        } else if (name == "hd") {
            const int half = std::max(cfg.N / 2, 1);
            const int N_t = cfg.N_t > 0 ? std::min(cfg.N_t, cfg.N) : half;
            const int N_r = cfg.N_r > 0 ? std::min(cfg.N_r, cfg.N) : half;
            MatrixXd theta = MatrixXd::Zero(cfg.M, cfg.K_d);
            for (int m = 0; m < cfg.M; ++m)
                for (int k = 0; k < cfg.K_d; ++k)
                    theta(m, k) = 1.0 / std::sqrt(N_t * cfg.K_d * s.gamma_dl(m, k));
            auto [ul, dl] = nafd_hd_se(theta, VectorXd::Ones(cfg.K_u),
                                       MatrixXd::Ones(cfg.M, cfg.K_u), s, N_t, N_r, prelog_half);
            VectorXd all(ul.size() + dl.size());
            all << ul, dl;
            rows.push_back(make_row(seed, name, "se", all));
        } else {
            throw config_error("nafd: unknown scheme '" + name + "'");
        }
    }
    return rows;
}

// ------------------------------------------------------------------- NOMA
inline std::vector<ResultRow> run_noma(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    require(cfg.K_l == 2, "noma: only pair clustering (K_l = 2) is implemented");
    const int K = cfg.L * cfg.K_l;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x40AA, seed);
    auto geo = drop_network(cfg.M, K, cfg.area_side, derive_seed(s0, 1, 0));
    MatrixXd beta =
        three_slope_beta(geo, ThreeSlopeParams{}, cfg.shadow_std_db, derive_seed(s0, 2, 0));
    const double prelog = static_cast<double>(cfg.tau_c - cfg.tau_up) / cfg.tau_c;

    auto schemes =
        cfg.schemes.empty() ? std::vector<std::string>{"far", "random", "close"} : cfg.schemes;
    for (const auto& name : schemes) {
        PairingScheme ps;
        if (name == "far") ps = PairingScheme::FAR;
        else if (name == "close") ps = PairingScheme::CLOSE;
        else if (name == "random") ps = PairingScheme::RANDOM;
        else throw config_error("noma: unknown scheme '" + name + "'");
        auto clusters = noma_pairing(geo, ps, derive_seed(s0, 3, 0));
        auto nc = make_noma_clusters(beta, clusters, cfg.N, cfg.tau_up, cfg.rho(cfg.p_p),
                                     cfg.rho(cfg.p_d));
        auto problem = make_noma_maxmin_problem(nc);
        auto sol = solve_maxmin_bisection(problem, cfg.maxmin_tol);
        auto eta = noma_unpack_eta(nc, sol.mu);
        rows.push_back(make_row(seed, name, "se", noma_effective_se(nc, eta, prelog)));
    }
    return rows;
}

// -------------------------------------------------------------------- PLS
inline std::vector<ResultRow> run_pls(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x715, seed);
    auto geo = drop_network(cfg.M, cfg.K, cfg.area_side, derive_seed(s0, 1, 0));
    // shadowing drawn explicitly so the eavesdropper, sitting a few tens of
    // meters from the attacked UE, shares that UE's shadow realization
    ThreeSlopeParams tsp;
    MatrixXd beta(cfg.M, cfg.K);
    MatrixXd shadow(cfg.M, cfg.K);
    {
        Rng rng(derive_seed(s0, 2, 0));
        for (int m = 0; m < cfg.M; ++m)
            for (int k = 0; k < cfg.K; ++k) {
                shadow(m, k) = rng.gauss();
                const double d = geo.ap_ue_distance(m, k);
                double pl = tsp.path_loss_dB(d);
                if (cfg.shadow_std_db > 0.0 && tsp.in_far_slope(d))
                    pl += cfg.shadow_std_db * shadow(m, k);
                beta(m, k) = db_to_linear(pl);
            }
    }
    const double rho_u = cfg.rho(cfg.p_u), rho_d = cfg.rho(cfg.p_d);
    const int tau_up = std::max(cfg.tau_up, cfg.K);  // orthogonal legitimate pilots

    auto schemes = cfg.schemes.empty() ? std::vector<std::string>{"ppzf", "mrt"} : cfg.schemes;
    for (double radius : cfg.eve_radius) {
        // Eve uniform in a disc around the attacked UE
        Rng rng(derive_seed(s0, 3, static_cast<std::uint64_t>(radius * 1000)));
        const double rr = radius * std::sqrt(rng.uniform());
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        Eigen::Vector2d eve_pos = geo.ue_positions[0] + rr * Eigen::Vector2d(std::cos(th), std::sin(th));
        EveModel eve;
        eve.rho_E = cfg.rho(cfg.rho_e_watts);
        eve.target_ue = 0;
        eve.beta_E = VectorXd::Zero(cfg.M);
        for (int m = 0; m < cfg.M; ++m) {
            const double d = geo.distance(geo.ap_positions[m], eve_pos);
            double pl = tsp.path_loss_dB(d);
            if (cfg.shadow_std_db > 0.0 && tsp.in_far_slope(d))
                pl += cfg.shadow_std_db * shadow(m, 0);
            eve.beta_E(m) = db_to_linear(pl);
        }
        auto g = pls_gamma(beta, eve, rho_u, tau_up);
        MatrixXd eta = MatrixXd::Constant(cfg.M, cfg.K, 1.0 / cfg.K);

        for (const auto& name : schemes) {
            std::vector<std::vector<int>> strong(cfg.M);
            if (name == "ppzf")
                strong = group_by_largescale(beta, cfg.strong_fraction, cfg.N - 1).strong;
            else if (name != "mrt") throw config_error("pls: unknown scheme '" + name + "'");
            const double rsec = pls_secrecy_se(eta, strong, beta, g, eve, rho_d, cfg.N);
            VectorXd v(1);
            v << rsec;
            rows.push_back(make_row(seed, name + "_r" + std::to_string(int(radius)),
                                    "secrecy_se", v));
        }
    }
    return rows;
}

// --------------------------------------------------------------------- EH
inline std::vector<ResultRow> run_eh(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0xE4, seed);
    const int total = cfg.K_d + cfg.L;
    auto geo = drop_network(cfg.M, total, cfg.area_side, derive_seed(s0, 1, 0));
    MatrixXd beta =
        three_slope_beta(geo, ThreeSlopeParams{}, cfg.shadow_std_db, derive_seed(s0, 2, 0));
    EhScalars s;
    s.N = cfg.N;
    s.rho_d = cfg.rho(cfg.p_d);
    s.p_d_watts = cfg.p_d;
    s.beta_iu = beta.leftCols(cfg.K_d);
    s.beta_eu = beta.rightCols(cfg.L);
    const int tau_up = std::max(cfg.tau_up, total);
    const double trp = tau_up * cfg.rho(cfg.p_p);
    auto gam = [&](const MatrixXd& b) {
        return (trp * b.array().square() / (trp * b.array() + 1.0)).matrix();
    };
    s.gamma_iu = gam(s.beta_iu);
    s.gamma_eu = gam(s.beta_eu);
    require(s.N > cfg.K_d, "eh: partial ZF needs N > K_d");
    const double prelog = static_cast<double>(cfg.tau_c - tau_up) / cfg.tau_c;
    EHModelParams params;
    const VectorXd floors = VectorXd::Constant(cfg.L, cfg.he_floor_watts);

    auto schemes = cfg.schemes.empty()
                       ? std::vector<std::string>{"exhaustive", "benchmark1", "benchmark2",
                                                  "benchmark3"}
                       : cfg.schemes;
    for (const auto& name : schemes) {
        EhStrategy st;
        if (name == "exhaustive") st = EhStrategy::EXHAUSTIVE;
        else if (name == "benchmark1") st = EhStrategy::RANDOM_OPTIMIZED;
        else if (name == "benchmark2") st = EhStrategy::RANDOM_EQUAL;
        else if (name == "benchmark3") st = EhStrategy::SPLIT_ORTHOGONAL;
        else throw config_error("eh: unknown scheme '" + name + "'");
        auto out = eh_mode_selection(s, params, st, cfg.se_floor, floors, prelog,
                                     cfg.eh_energy_trials, derive_seed(s0, 4, 0));
        rows.push_back(make_row(seed, name, "harvested_watts", out.harvested));
        rows.push_back(make_row(seed, name, "iu_se", out.se));
    }
    return rows;
}

// -------------------------------------------------------------------- RIS
inline std::vector<ResultRow> run_ris(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x415, seed);
    auto geo = drop_network(cfg.M, cfg.K, cfg.area_side, derive_seed(s0, 1, 0));
    // hotspot deployment: the surface sits mid-wall and the UEs cluster near it
    const Eigen::Vector2d ris_pos(0.0, cfg.area_side / 2.0);
    {
        Rng rng(derive_seed(s0, 2, 0));
        for (auto& u : geo.ue_positions) {
            const double rr = 20.0 + 60.0 * std::sqrt(rng.uniform());
            const double th = rng.uniform(-M_PI / 2, M_PI / 2);
            u = ris_pos + rr * Eigen::Vector2d(std::cos(th), std::sin(th));
            u.x() = std::min(std::max(u.x(), 0.0), cfg.area_side);
            u.y() = std::min(std::max(u.y(), 0.0), cfg.area_side);
        }
    }
    MatrixXd beta_bar =
        three_slope_beta(geo, ThreeSlopeParams{}, cfg.shadow_std_db, derive_seed(s0, 3, 0));
    // reflected segments are deployed for line of sight
    auto los = [](double d) { return db_to_linear(-30.5 - 22.0 * std::log10(std::max(d, 1.0))); };
    VectorXd beta_ap_ris(cfg.M), beta_ris_ue(cfg.K);
    for (int m = 0; m < cfg.M; ++m) beta_ap_ris(m) = los(geo.distance(geo.ap_positions[m], ris_pos));
    for (int k = 0; k < cfg.K; ++k) beta_ris_ue(k) = los(geo.distance(geo.ue_positions[k], ris_pos));

    auto pilots = assign_pilots_random(cfg.K, cfg.tau_up, derive_seed(s0, 4, 0), cfg.rho(cfg.p_p));
    const MatrixXd mask = ris_blocking(MatrixXd::Ones(cfg.M, cfg.K), cfg.p_direct,
                                       derive_seed(s0, 5, 0));
    const double rho_u = cfg.rho(cfg.p_u), rho_d = cfg.rho(cfg.p_d);
    const double prelog_ul = static_cast<double>(cfg.tau_u_eff()) / cfg.tau_c;
    const double prelog_dl = static_cast<double>(cfg.tau_d_eff()) / cfg.tau_c;

    const MatrixXcd corr = ris_element_correlation(cfg.n_ris, cfg.ris_spacing_wavelengths, 1.0);
    auto schemes = cfg.schemes.empty()
                       ? std::vector<std::string>{"ris", "no_ris", "ris_blocked"}
                       : cfg.schemes;
    for (const auto& name : schemes) {
        RISModel ris;
        ris.n_elements = cfg.n_ris;
        ris.phases = VectorXd::Zero(cfg.n_ris);
        MatrixXd beta = beta_bar.cwiseProduct(mask);
        if (name == "ris" || name == "ris_blocked") {
            for (int m = 0; m < cfg.M; ++m) ris.R_ap.push_back(beta_ap_ris(m) * corr);
            for (int k = 0; k < cfg.K; ++k) ris.R_ue.push_back(beta_ris_ue(k) * corr);
            if (name == "ris_blocked") beta.setZero();
        } else if (name == "no_ris") {
            ris.n_elements = 0;
            ris.phases = VectorXd::Zero(0);
            const MatrixXcd zero = MatrixXcd::Zero(0, 0);
            for (int m = 0; m < cfg.M; ++m) ris.R_ap.push_back(zero);
            for (int k = 0; k < cfg.K; ++k) ris.R_ue.push_back(zero);
        } else {
            throw config_error("ris: unknown scheme '" + name + "'");
        }
        auto est = ris_estimate(ris, beta, pilots);
        // full power, each AP weighting its UEs by estimate quality
        MatrixXd eta = MatrixXd::Zero(cfg.M, cfg.K);
        for (int m = 0; m < cfg.M; ++m) {
            double z = 0.0;
            for (int k = 0; k < cfg.K; ++k) z += est.gamma(m, k) * est.gamma(m, k);
            if (z > 0.0)
                for (int k = 0; k < cfg.K; ++k) eta(m, k) = est.gamma(m, k) / z;
        }
        auto res = ris_se(ris, est, pilots, eta, VectorXd::Ones(cfg.K), rho_u, rho_d, prelog_ul,
                          prelog_dl);
        rows.push_back(make_row(seed, name, "ul_se", res.ul_se));
        rows.push_back(make_row(seed, name, "dl_se", res.dl_se));
    }
    return rows;
}

// ----------------------------------------------------------------- lemmas
inline std::vector<ResultRow> run_lemmas(const ExperimentConfig& cfg, long seed) {
    std::vector<ResultRow> rows;
    const std::uint64_t s0 = derive_seed(cfg.master_seed, 0x7E44, seed);
    const long T = cfg.trials;
    Rng rng(derive_seed(s0, 1, 0));
    auto push = [&](const std::string& name, const LemmaCheckResult& r) {
        VectorXd v(4);
        v << r.statistic, r.target, r.tolerance, r.passed ? 1.0 : 0.0;
        rows.push_back(make_row(seed, name, "lemma", v));
    };
    MatrixXcd A = rng.cgauss_matrix(16, 16);
    A = 0.5 * (A + A.adjoint().eval());
    push("trace_quadratic", check_trace_lemma(16, A, T, derive_seed(s0, 2, 0)));
    push("trace_cross", check_trace_lemma_cross(16, A, T, derive_seed(s0, 3, 0)));
    push("wishart_inverse", check_wishart_inverse_trace(2, 4, T, derive_seed(s0, 4, 0)));
    {
        VectorXcd mu = rng.cgauss_vector(3);
        MatrixXcd S = rng.cgauss_matrix(3, 3);
        S = (S * S.adjoint()).eval();
        MatrixXcd B = rng.cgauss_matrix(3, 3);
        B = (B * B.adjoint()).eval();
        push("quadratic_mean", check_quadratic_form_mean(mu, S, B, T, derive_seed(s0, 5, 0)));
        push("quadratic_second_moment",
             check_quadratic_form_second_moment(S, B, 2 * T, derive_seed(s0, 6, 0)));
        push("double_quadratic", check_double_quadratic(S, B, B, 2 * T, derive_seed(s0, 7, 0)));
    }
    push("projection_mean", check_projection_expectation(4, 2, T, derive_seed(s0, 8, 0)));
    return rows;
}

}  // namespace engines

inline std::vector<ResultRow> run_seed(const ExperimentConfig& cfg, long seed) {
    switch (cfg.scenario) {
        case Scenario::DL: return engines::run_dl(cfg, seed);
        case Scenario::UL: return engines::run_ul(cfg, seed);
        case Scenario::NAFD: return engines::run_nafd(cfg, seed);
        case Scenario::NOMA: return engines::run_noma(cfg, seed);
        case Scenario::PLS: return engines::run_pls(cfg, seed);
        case Scenario::EH: return engines::run_eh(cfg, seed);
        case Scenario::RIS: return engines::run_ris(cfg, seed);
        case Scenario::LEMMAS: return engines::run_lemmas(cfg, seed);
    }
    throw invalid_argument_error("run_seed: unknown scenario");
}

}  // namespace cfmimo

#endif
