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

#include <catch2/catch_amalgamated.hpp>

#include "cfmimo/netmodel.hpp"

using namespace cfmimo;

TEST_CASE("drop_network basics") {
    auto g = drop_network(1, 1, 1.0, 0);
    REQUIRE(g.num_aps() == 1);
    REQUIRE(g.num_ues() == 1);
    CHECK(g.ap_positions[0].x() >= 0.0);
    CHECK(g.ap_positions[0].x() <= 1.0);
    CHECK(g.ue_positions[0].y() >= 0.0);
    CHECK(g.ue_positions[0].y() <= 1.0);

    auto a = drop_network(40, 10, 1000.0, 7);
    auto b = drop_network(40, 10, 1000.0, 7);
    for (int m = 0; m < 40; ++m) REQUIRE(a.ap_positions[m] == b.ap_positions[m]);
    for (int k = 0; k < 10; ++k) REQUIRE(a.ue_positions[k] == b.ue_positions[k]);

    CHECK_THROWS_AS(drop_network(0, 1, 1.0, 0), invalid_argument_error);
    CHECK_THROWS_AS(drop_network(1, 1, -1.0, 0), invalid_argument_error);
}

TEST_CASE("drop_network uniform-law moments") {
    // mean position of 150 uniform points: 500 within 3 sigma of the
    // analytic uniform standard deviation side/sqrt(12)/sqrt(n)
    auto g = drop_network(100, 50, 1000.0, 3);
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : g.ap_positions) mean += p;
    for (const auto& p : g.ue_positions) mean += p;
    mean /= 150.0;
    const double sigma = 1000.0 / std::sqrt(12.0) / std::sqrt(150.0);
    CHECK(std::abs(mean.x() - 500.0) < 3.0 * sigma);
    CHECK(std::abs(mean.y() - 500.0) < 3.0 * sigma);
}

TEST_CASE("three-slope path loss shape") {
    ThreeSlopeParams p;
    SECTION("monotone beyond the breakpoints without shadowing") {
        CHECK(p.path_loss_dB(100.0) > p.path_loss_dB(200.0));
        CHECK(p.path_loss_dB(20.0) > p.path_loss_dB(40.0));
        CHECK(p.path_loss_dB(5.0) == p.path_loss_dB(9.0));  // clamped segment
    }
    SECTION("continuity at the breakpoints") {
        for (double d : {p.d0, p.d1}) {
            const double below = p.path_loss_dB(d * (1.0 - 1e-9));
            const double above = p.path_loss_dB(d * (1.0 + 1e-9));
            CHECK(std::abs(below - above) < 1e-6 * std::abs(below));
        }
    }
    SECTION("shadowing std matches the configured value") {
        // Monte Carlo oracle: sample std of 10log10(beta) at fixed far-slope
        // distance must be 8 +- 0.1 dB over 1e5 samples
        NetworkGeometry geo;
        geo.area_side = 1000.0;
        geo.ap_positions.assign(1, {0.0, 0.0});
        geo.ue_positions.assign(1, {500.0, 0.0});
        double sum = 0.0, sumsq = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            MatrixXd beta = three_slope_beta(geo, p, 8.0, 1000 + i);
            const double db = linear_to_db(beta(0, 0));
            sum += db;
            sumsq += db * db;
        }
        const double var = sumsq / n - (sum / n) * (sum / n);
        CHECK(std::sqrt(var) == Catch::Approx(8.0).margin(0.1));
    }
}

TEST_CASE("local scattering correlation") {
    SECTION("scalar case") {
        MatrixXcd R = local_scattering_correlation(3.5, 0.3, 0.1, 1);
        REQUIRE(R.rows() == 1);
        CHECK(R(0, 0).real() == Catch::Approx(3.5));
    }
    SECTION("zero angular spread is rank one") {
        MatrixXcd R = local_scattering_correlation(1.0, 0.5, 0.0, 4);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(R);
        const VectorXd ev = es.eigenvalues();
        CHECK(ev(2) / ev(3) < 1e-8);
    }
    SECTION("trace normalization") {
        MatrixXcd R = local_scattering_correlation(2.0, 0.7, 10.0 * M_PI / 180.0, 8);
        CHECK(R.trace().real() == Catch::Approx(16.0).epsilon(1e-9));
        // Hermitian PSD
        CHECK((R - R.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(R);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
    CHECK_THROWS_AS(local_scattering_correlation(-1.0, 0.0, 0.1, 4), invalid_argument_error);
}

TEST_CASE("channel draws") {
    SECTION("zero covariance gives the zero vector") {
        LargeScaleModel lsm;
        lsm.beta = MatrixXd::Zero(1, 1);
        lsm.antennas = 3;
        lsm.correlated = true;
        lsm.R = {{MatrixXcd::Zero(3, 3)}};
        auto cr = draw_channels(lsm, 5);
        CHECK(cr.h[0].norm() == 0.0);
    }
    SECTION("identity covariance sample statistics") {
        LargeScaleModel lsm;
        lsm.beta = MatrixXd::Ones(1, 1);
        lsm.antennas = 2;
        lsm.correlated = true;
        lsm.R = {{MatrixXcd::Identity(2, 2)}};
        MatrixXcd cov = MatrixXcd::Zero(2, 2);
        const int T = 100000;
        for (int t = 0; t < T; ++t) {
            auto cr = draw_channels(lsm, 100 + t);
            cov += cr.h[0].col(0) * cr.h[0].col(0).adjoint();
        }
        cov /= double(T);
        CHECK((cov - MatrixXcd::Identity(2, 2)).norm() / std::sqrt(2.0) < 0.05);
    }
    SECTION("rank-one covariance draws are collinear with the steering vector") {
        MatrixXcd R = local_scattering_correlation(1.0, 0.4, 0.0, 4);
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(R);
        VectorXcd steer = es.eigenvectors().col(3);
        LargeScaleModel lsm;
        lsm.beta = MatrixXd::Ones(1, 1);
        lsm.antennas = 4;
        lsm.correlated = true;
        lsm.R = {{R}};
        for (int t = 0; t < 20; ++t) {
            auto cr = draw_channels(lsm, 33 + t);
            const double cosine =
                std::abs((cxd)(steer.adjoint() * cr.h[0].col(0))(0)) / cr.h[0].col(0).norm();
            CHECK(cosine == Catch::Approx(1.0).margin(1e-10));
        }
    }
    SECTION("reproducible for a fixed seed") {
        LargeScaleModel lsm;
        lsm.beta = MatrixXd::Constant(3, 2, 0.7);
        lsm.antennas = 2;
        auto a = draw_channels(lsm, 42);
        auto b = draw_channels(lsm, 42);
        for (int m = 0; m < 3; ++m) REQUIRE(a.h[m] == b.h[m]);
    }
}

TEST_CASE("large-scale model invariants") {
    // trace identity of generated correlation matrices and the energy of the
    // drawn channels against it
    auto geo = drop_network(4, 3, 500.0, 11);
    MatrixXd beta = three_slope_beta(geo, ThreeSlopeParams{}, 0.0, 12);
    LargeScaleModel lsm;
    lsm.beta = beta;
    lsm.antennas = 4;
    lsm.correlated = true;
    lsm.R.resize(4, std::vector<MatrixXcd>(3));
    Rng rng(99);
    for (int m = 0; m < 4; ++m)
        for (int k = 0; k < 3; ++k) {
            lsm.R[m][k] = local_scattering_correlation(beta(m, k), rng.uniform(-1.0, 1.0),
                                                       0.2, 4);
            CHECK(lsm.R[m][k].trace().real() / 4.0 ==
                  Catch::Approx(beta(m, k)).epsilon(1e-9));
        }
    double energy = 0.0;
    const int T = 10000;
    for (int t = 0; t < T; ++t) {
        auto cr = draw_channels(lsm, 7000 + t);
        energy += cr.h[0].col(0).squaredNorm();
    }
    energy /= T;
    CHECK(energy == Catch::Approx(lsm.R[0][0].trace().real()).epsilon(0.03));
}

TEST_CASE("coherence block budget") {
    CoherenceBlock cb;
    cb.tau_c = 200;
    cb.tau_up = 10;
    cb.tau_d = 95;
    cb.tau_u = 95;
    cb.validate();
    CHECK(cb.prelog_dl() == Catch::Approx(0.475));
    CHECK(cb.prelog_half() == Catch::Approx(0.475));
    cb.tau_d = 120;
    CHECK_THROWS_AS(cb.validate(), invalid_argument_error);
}
