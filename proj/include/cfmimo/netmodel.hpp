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

#ifndef CFMIMO_NETMODEL_HPP
#define CFMIMO_NETMODEL_HPP

#include <cmath>
#include <vector>

#include "cfmimo/common.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

// TDD frame budget: tau_c samples split into pilot / DL data / UL data parts.
struct CoherenceBlock {
    int tau_c = 200;
    int tau_up = 10;
    int tau_d = 95;
    int tau_u = 95;

    void validate() const {
        require(tau_up >= 1, "coherence block: tau_up must be >= 1");
        require(tau_d >= 0 && tau_u >= 0 && tau_c >= 1, "coherence block: negative field");
        require(tau_up + tau_d + tau_u <= tau_c, "coherence block: tau_up+tau_d+tau_u exceeds tau_c");
    }
    double prelog_dl() const { return static_cast<double>(tau_d) / tau_c; }
    double prelog_ul() const { return static_cast<double>(tau_u) / tau_c; }
    // data phase split evenly between DL and UL, used by half-duplex operation
    double prelog_half() const { return (tau_c - tau_up) / (2.0 * tau_c); }
    double prelog_full() const { return static_cast<double>(tau_c - tau_up) / tau_c; }
};

struct NetworkGeometry {
    double area_side = 1000.0;  // meters
    std::vector<Eigen::Vector2d> ap_positions;
    std::vector<Eigen::Vector2d> ue_positions;
    bool wrap_around = false;

    int num_aps() const { return static_cast<int>(ap_positions.size()); }
    int num_ues() const { return static_cast<int>(ue_positions.size()); }

    double distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
        if (!wrap_around) return (a - b).norm();
        double dx = std::abs(a.x() - b.x());
        double dy = std::abs(a.y() - b.y());
        dx = std::min(dx, area_side - dx);
        dy = std::min(dy, area_side - dy);
        return std::hypot(dx, dy);
    }
    double ap_ue_distance(int m, int k) const {
        return distance(ap_positions[m], ue_positions[k]);
    }
};

inline NetworkGeometry drop_network(int M, int K, double area_side, std::uint64_t seed) {
    require(M >= 1 && K >= 1, "drop_network: M and K must be >= 1");
    require(area_side > 0.0, "drop_network: area_side must be positive");
    NetworkGeometry g;
    g.area_side = area_side;
    Rng rng(derive_seed(seed, 0xA9, 0));
    g.ap_positions.reserve(M);
    g.ue_positions.reserve(K);
    for (int m = 0; m < M; ++m)
        g.ap_positions.emplace_back(rng.uniform() * area_side, rng.uniform() * area_side);
    for (int k = 0; k < K; ++k)
        g.ue_positions.emplace_back(rng.uniform() * area_side, rng.uniform() * area_side);
    return g;
}

// Three-slope path loss with breakpoints d0 < d1 (meters). Distances below
// min_distance are clamped. Log-normal shadowing applies only beyond d1.
struct ThreeSlopeParams {
    double L_dB = 140.72;  // fixed loss at 1 km on the far slope
    double d0 = 10.0;
    double d1 = 50.0;
    double min_distance = 1.0;

    double path_loss_dB(double d) const {
        d = std::max(d, min_distance);
        const double km = 1.0e-3;
        if (d > d1) return -L_dB - 35.0 * std::log10(d * km);
        if (d > d0) return -L_dB - 15.0 * std::log10(d1 * km) - 20.0 * std::log10(d * km);
        return -L_dB - 15.0 * std::log10(d1 * km) - 20.0 * std::log10(d0 * km);
    }
    bool in_far_slope(double d) const { return std::max(d, min_distance) > d1; }
};

// Large-scale model: beta gains, optional per-link spatial correlation, and
// the noise power used to normalize pilot/data SNRs. In uncorrelated mode
// R_{lk} = beta_{lk} I_N is implicit and never materialized.
struct LargeScaleModel {
    MatrixXd beta;  // M x K, linear
    int antennas = 1;
    double noise_power = 1.0;  // watts
    bool correlated = false;
    std::vector<std::vector<MatrixXcd>> R;  // M x K of N x N, only if correlated

    int num_aps() const { return static_cast<int>(beta.rows()); }
    int num_ues() const { return static_cast<int>(beta.cols()); }

    MatrixXcd corr(int m, int k) const {
        if (correlated) return R[m][k];
        return beta(m, k) * MatrixXcd::Identity(antennas, antennas);
    }
};

inline MatrixXd three_slope_beta(const NetworkGeometry& geo, const ThreeSlopeParams& params,
                                 double shadow_std_dB, std::uint64_t seed) {
    require(shadow_std_dB >= 0.0, "three_slope_beta: shadow_std_dB must be >= 0");
    const int M = geo.num_aps(), K = geo.num_ues();
    MatrixXd beta(M, K);
    Rng rng(derive_seed(seed, 0xB3, 0));
    for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
            const double d = geo.ap_ue_distance(m, k);
            double pl = params.path_loss_dB(d);
            if (shadow_std_dB > 0.0 && params.in_far_slope(d)) pl += shadow_std_dB * rng.gauss();
            beta(m, k) = db_to_linear(pl);
        }
    }
    return beta;
}

// Gaussian local scattering over a uniform linear array. The matrix is built
// as a positive quadrature mixture of steering outer products, so it is PSD by
// construction and its diagonal equals beta exactly.
inline MatrixXcd local_scattering_correlation(double beta, double angle, double angular_std,
                                              int N, double antenna_spacing = 0.5) {
    require(beta >= 0.0, "local_scattering_correlation: beta must be >= 0");
    require(N >= 1, "local_scattering_correlation: N must be >= 1");
    auto steering = [&](double phi) {
        VectorXcd a(N);
        for (int n = 0; n < N; ++n)
            a(n) = std::polar(1.0, 2.0 * M_PI * antenna_spacing * n * std::sin(phi));
        return a;
    };
    if (angular_std <= 0.0) {
        VectorXcd a = steering(angle);
        return beta * (a * a.adjoint());
    }
    // fixed-grid Gaussian-weighted mixture over +-6 sigma of the angle law
    constexpr int Q = 41;
    MatrixXcd Rm = MatrixXcd::Zero(N, N);
    double wsum = 0.0;
    for (int q = 0; q < Q; ++q) {
        // positive weights keep the sum PSD; unit-modulus steering keeps the trace exact
        const double t = -6.0 + 12.0 * q / (Q - 1);
        const double w = std::exp(-0.5 * t * t);
        VectorXcd a = steering(angle + angular_std * t);
        Rm += w * (a * a.adjoint());
        wsum += w;
    }
    Rm *= beta / wsum;
    return Rm;
}

struct ChannelRealization {
    std::vector<MatrixXcd> h;  // per AP: N x K
    int num_aps() const { return static_cast<int>(h.size()); }
};

inline ChannelRealization draw_channels(const LargeScaleModel& lsm, std::uint64_t seed) {
    const int M = lsm.num_aps(), K = lsm.num_ues(), N = lsm.antennas;
    ChannelRealization cr;
    cr.h.resize(M);
    for (int m = 0; m < M; ++m) {
        cr.h[m].resize(N, K);
        Rng rng(derive_seed(seed, 0xC0DE, static_cast<std::uint64_t>(m)));
        for (int k = 0; k < K; ++k) {
            VectorXcd z = rng.cgauss_vector(N);
            if (lsm.correlated)
                cr.h[m].col(k) = psd_sqrt(lsm.R[m][k]) * z;
            else
                cr.h[m].col(k) = std::sqrt(lsm.beta(m, k)) * z;
        }
    }
    return cr;
}

}  // namespace cfmimo

#endif
