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

#include "cfmimo/nafd.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {

NafdScalars random_scalars(int M, int Kd, int Ku, int N, std::uint64_t seed,
                           double si_ratio = 1e3) {
    Rng rng(seed);
    NafdScalars s;
    s.N = N;
    s.rho_u = 50.0;
    s.rho_d = 200.0;
    auto mat = [&](int r, int c, double scale) {
        MatrixXd m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = scale * (0.2 + rng.uniform());
        return m;
    };
    s.beta_dl = mat(M, Kd, 1e-2);
    s.beta_ul = mat(M, Ku, 1e-2);
    const double trp = 1e4;
    auto gam = [&](const MatrixXd& b) {
        return (trp * b.array().square() / (trp * b.array() + 1.0)).matrix();
    };
    s.gamma_dl = gam(s.beta_dl);
    s.gamma_ul = gam(s.beta_ul);
    s.beta_du = mat(Kd, Ku, 1e-3);
    s.beta_ap = mat(M, M, 1e-3);
    for (int m = 0; m < M; ++m) s.beta_ap(m, m) = si_ratio / s.rho_d;
    return s;
}

}  // namespace

TEST_CASE("mixed-mode SE evaluation") {
    SECTION("no receiving APs means zero UL SE") {
        auto s = random_scalars(4, 2, 2, 2, 1);
        NafdState st = nafd_fixed_power_state(s, {1, 1, 1, 1}, {0, 0, 0, 0});
        auto [ul, dl] = nafd_se(st, s, 0.95);
        CHECK(ul.maxCoeff() == 0.0);
        CHECK(dl.minCoeff() > 0.0);
    }
    SECTION("overwhelming self-interference kills the full-duplex uplink") {
        auto s = random_scalars(3, 2, 2, 2, 2, 1e18);
        MatrixXd theta = MatrixXd::Zero(3, 2);
        for (int m = 0; m < 3; ++m)
            for (int k = 0; k < 2; ++k)
                theta(m, k) = 1.0 / std::sqrt(2.0 * 2.0 * s.gamma_dl(m, k));
        auto [ul, dl] = nafd_fd_se(s, theta, VectorXd::Ones(2), MatrixXd::Ones(3, 2), 0.95);
        CHECK(ul.maxCoeff() < 1e-9);
    }
    SECTION("full-duplex special case is the mode substitution identity") {
        auto s = random_scalars(4, 2, 2, 2, 3);
        MatrixXd theta = MatrixXd::Constant(4, 2, 0.01);
        VectorXd vs = VectorXd::Constant(2, 0.7);
        MatrixXd alpha = MatrixXd::Constant(4, 2, 0.5);
        auto fd = nafd_fd_se(s, theta, vs, alpha, 0.95);
        NafdState st;
        st.a.assign(4, 1);
        st.b.assign(4, 1);
        st.theta = theta;
        st.varsigma = vs;
        st.alpha = alpha;
        auto direct = nafd_se(st, s, 0.95);
        for (int l = 0; l < 2; ++l)
            CHECK(fd.first(l) == Catch::Approx(direct.first(l)).epsilon(1e-12));
        for (int k = 0; k < 2; ++k)
            CHECK(fd.second(k) == Catch::Approx(direct.second(k)).epsilon(1e-12));
    }
}

TEST_CASE("half-duplex reference expressions") {
    SECTION("all-DL mixed mode coincides with the HD DL expression term by term") {
        auto s = random_scalars(4, 2, 0, 2, 4);  // no UL UEs
        NafdState st = nafd_fixed_power_state(s, std::vector<int>(4, 1), std::vector<int>(4, 0));
        const double prelog = 0.95;
        auto [ul, dl] = nafd_se(st, s, prelog);
        auto hd = nafd_hd_se(st.theta, st.varsigma, st.alpha, s, s.N, s.N, prelog / 2.0);
        for (int k = 0; k < 2; ++k)
            CHECK(dl(k) == Catch::Approx(2.0 * hd.second(k)).epsilon(1e-12));
    }
    SECTION("zero DL power means zero DL SE") {
        auto s = random_scalars(3, 2, 2, 2, 5);
        auto hd = nafd_hd_se(MatrixXd::Zero(3, 2), VectorXd::Ones(2), MatrixXd::Ones(3, 2), s, 1,
                             1, 0.475);
        CHECK(hd.second.maxCoeff() == 0.0);
    }
}

TEST_CASE("mode assignment search") {
    SECTION("a single AP picks its better mode") {
        auto s = random_scalars(1, 1, 1, 2, 6);
        auto [a, b] = nafd_greedy_modes(s, 0.95);
        auto best = nafd_exhaustive_modes(s, 0.95);
        CHECK(a == best.a);
        CHECK(b == best.b);
    }
    SECTION("without uplink demand every AP goes downlink") {
        auto s = random_scalars(5, 3, 0, 2, 7);
        auto [a, b] = nafd_greedy_modes(s, 0.95);
        for (int m = 0; m < 5; ++m) {
            CHECK(a[m] == 1);
            CHECK(b[m] == 0);
        }
    }
    SECTION("greedy beats the average random assignment") {
        auto s = random_scalars(6, 3, 3, 2, 8);
        auto [a, b] = nafd_greedy_modes(s, 0.95);
        const double greedy = nafd_sum_se(s, a, b, 0.95);
        Rng rng(9);
        double random_mean = 0.0;
        for (int i = 0; i < 100; ++i) {
            std::vector<int> ra(6), rb(6);
            for (int m = 0; m < 6; ++m) {
                ra[m] = rng.uniform() < 0.5 ? 1 : 0;
                rb[m] = 1 - ra[m];
            }
            random_mean += nafd_sum_se(s, ra, rb, 0.95);
        }
        random_mean /= 100.0;
        CHECK(greedy >= random_mean);
    }
    SECTION("enumeration dominates greedy") {
        for (std::uint64_t seed : {10u, 11u, 12u}) {
            auto s = random_scalars(8, 3, 3, 2, seed);
            auto [a, b] = nafd_greedy_modes(s, 0.95);
            auto best = nafd_exhaustive_modes(s, 0.95);
            CHECK(best.sum_se >= nafd_sum_se(s, a, b, 0.95) - 1e-12);
        }
    }
    SECTION("enumeration size guard") {
        auto s = random_scalars(13, 1, 1, 1, 13);
        CHECK_THROWS_AS(nafd_exhaustive_modes(s, 0.95), invalid_argument_error);
    }
}

TEST_CASE("state validation") {
    auto s = random_scalars(2, 2, 1, 2, 14);
    NafdState st = nafd_fixed_power_state(s, {1, 0}, {0, 1});
    st.validate(s);
    SECTION("conflicting modes rejected") {
        st.a[1] = 1;
        CHECK_THROWS_AS(st.validate(s), invalid_argument_error);
    }
    SECTION("powered-down APs cannot transmit") {
        st = nafd_fixed_power_state(s, {1, 0}, {0, 1});
        st.theta(1, 0) = 0.1;
        CHECK_THROWS_AS(st.validate(s), invalid_argument_error);
    }
    SECTION("per-AP budget enforced") {
        st = nafd_fixed_power_state(s, {1, 0}, {0, 1});
        st.theta(0, 0) *= 10.0;
        CHECK_THROWS_AS(st.validate(s), invalid_argument_error);
    }
}
