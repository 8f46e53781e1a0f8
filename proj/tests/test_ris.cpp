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

#include "cfmimo/ris.hpp"

using namespace cfmimo;

namespace {
RISModel make_ris(int n, const std::vector<double>& ap_gain, const std::vector<double>& ue_gain,
                  double spacing = 0.25) {
    RISModel r;
    r.n_elements = n;
    r.phases = VectorXd::Zero(n);
    for (double g : ap_gain) r.R_ap.push_back(ris_element_correlation(n, spacing, g));
    for (double g : ue_gain) r.R_ue.push_back(ris_element_correlation(n, spacing, g));
    return r;
}
}  // namespace

TEST_CASE("aggregated channel estimate statistics") {
    SECTION("identity correlations make delta = beta + n_elements") {
        RISModel r;
        r.n_elements = 4;
        r.phases = VectorXd::Zero(4);
        r.R_ap = {MatrixXcd::Identity(4, 4)};
        r.R_ue = {MatrixXcd::Identity(4, 4)};
        auto pb = assign_pilots_random(1, 1, 1, 10.0);
        MatrixXd beta(1, 1);
        beta << 0.5;
        auto e = ris_estimate(r, beta, pb);
        CHECK(e.delta(0, 0) == Catch::Approx(4.5).epsilon(1e-12));
    }
    SECTION("noise-free limit drives the NMSE to zero") {
        auto r = make_ris(4, {1e-2}, {2e-2});
        MatrixXd beta(1, 1);
        beta << 1e-2;
        auto probe = ris_estimate(r, beta, assign_pilots_random(1, 1, 2, 1.0));
        const double delta = probe.delta(0, 0);
        auto pb = assign_pilots_random(1, 1, 2, 1e6 / delta);  // rho tau = 1e6 / delta
        auto e = ris_estimate(r, beta, pb);
        CHECK(e.nmse(0, 0) < 1e-3);
    }
    SECTION("hand evaluation with diagonal correlations") {
        RISModel r;
        r.n_elements = 2;
        r.phases = VectorXd::Zero(2);
        r.R_ap = {(MatrixXcd(2, 2) << 2.0, 0.0, 0.0, 1.0).finished()};
        r.R_ue = {(MatrixXcd(2, 2) << 0.5, 0.0, 0.0, 1.5).finished()};
        MatrixXd beta(1, 1);
        beta << 0.25;
        auto pb = assign_pilots_random(1, 1, 3, 8.0);  // tau rho = 8
        auto e = ris_estimate(r, beta, pb);
        const double tr_theta = 2.0 * 0.5 + 1.0 * 1.5;  // diagonal product trace
        const double delta = 0.25 + tr_theta;
        const double c = std::sqrt(8.0) * delta / (8.0 * delta + 1.0);
        CHECK(e.delta(0, 0) == Catch::Approx(delta).epsilon(1e-12));
        CHECK(e.c(0, 0) == Catch::Approx(c).epsilon(1e-12));
        CHECK(e.gamma(0, 0) == Catch::Approx(std::sqrt(8.0) * delta * c).epsilon(1e-12));
        CHECK(e.nmse(0, 0) == Catch::Approx(1.0 - e.gamma(0, 0) / delta).epsilon(1e-12));
    }
    SECTION("delta dominates beta and NMSE stays in the unit interval") {
        auto r = make_ris(9, {1e-2, 3e-2}, {2e-2, 1e-2, 4e-2});
        MatrixXd beta = MatrixXd::Constant(2, 3, 1e-3);
        auto e = ris_estimate(r, beta, assign_pilots_random(3, 3, 4, 50.0));
        CHECK((e.delta.array() >= beta.array()).all());
        CHECK((e.nmse.array() >= 0.0).all());
        CHECK((e.nmse.array() <= 1.0).all());
    }
}

TEST_CASE("phase-shift design") {
    MatrixXd no_direct = MatrixXd::Zero(2, 2);
    auto pb = assign_pilots_random(2, 2, 5, 20.0);
    SECTION("without direct links coordinate descent cannot beat equal phases") {
        auto r = make_ris(4, {1e-2, 2e-2}, {1.5e-2, 0.5e-2});
        r.phases = ris_phase_design(r, no_direct, pb, RisPhaseMode::EQUAL);
        const double equal_obj = ris_total_nmse(r, no_direct, pb);
        RISModel rd = r;
        rd.phases = ris_phase_design(rd, no_direct, pb, RisPhaseMode::COORDINATE_DESCENT, 0, 16,
                                     4);
        const double cd_obj = ris_total_nmse(rd, no_direct, pb);
        CHECK(cd_obj <= equal_obj + 1e-9);
        CHECK(cd_obj >= equal_obj - 1e-9);  // equal phases are already optimal
    }
    SECTION("a single element has no phase to exploit") {
        auto r = make_ris(1, {1e-2}, {2e-2});
        MatrixXd beta = MatrixXd::Constant(1, 1, 1e-2);
        double lo = 1e300, hi = -1e300;
        for (int g = 0; g < 64; ++g) {
            r.phases(0) = -M_PI + 2.0 * M_PI * g / 64;
            const double v = ris_total_nmse(r, beta, assign_pilots_random(1, 1, 6, 20.0));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo < 1e-12);
    }
    SECTION("descent never loses to a random phase draw") {
        auto r = make_ris(4, {1e-2, 2e-2}, {1.5e-2, 0.5e-2});
        MatrixXd beta = MatrixXd::Constant(2, 2, 5e-3);
        RISModel rr = r;
        rr.phases = ris_phase_design(rr, beta, pb, RisPhaseMode::RANDOM, 77);
        const double random_obj = ris_total_nmse(rr, beta, pb);
        RISModel rd = r;
        rd.phases = ris_phase_design(rd, beta, pb, RisPhaseMode::COORDINATE_DESCENT, 0, 16, 4);
        CHECK(ris_total_nmse(rd, beta, pb) <= random_obj + 1e-12);
    }
}

TEST_CASE("RIS-assisted SE expressions") {
    auto r = make_ris(4, {1e-2, 2e-2}, {1.5e-2, 0.5e-2, 1e-2});
    MatrixXd beta = MatrixXd::Constant(2, 3, 5e-3);
    auto pb = assign_pilots_random(3, 2, 7, 20.0);  // one shared pilot pair
    auto e = ris_estimate(r, beta, pb);
    MatrixXd eta = MatrixXd::Constant(2, 3, 1.0);
    for (int m = 0; m < 2; ++m)
        for (int k = 0; k < 3; ++k) eta(m, k) = 1.0 / (3.0 * e.gamma(m, k));

    SECTION("powered-off directions") {
        auto off_ul = ris_se(r, e, pb, eta, VectorXd::Zero(3), 10.0, 10.0, 0.5, 0.5);
        CHECK(off_ul.ul_se.maxCoeff() == 0.0);
        auto off_dl = ris_se(r, e, pb, MatrixXd::Zero(2, 3), VectorXd::Ones(3), 10.0, 10.0, 0.5,
                             0.5);
        CHECK(off_dl.dl_se.maxCoeff() == 0.0);
    }
    SECTION("without elements the expressions reduce to the direct-only network") {
        RISModel none;
        none.n_elements = 0;
        none.phases = VectorXd::Zero(0);
        none.R_ap = {MatrixXcd::Zero(0, 0), MatrixXcd::Zero(0, 0)};
        none.R_ue = {MatrixXcd::Zero(0, 0), MatrixXcd::Zero(0, 0), MatrixXcd::Zero(0, 0)};
        auto e0 = ris_estimate(none, beta, pb);
        CHECK((e0.delta - beta).cwiseAbs().maxCoeff() == 0.0);
        MatrixXd eta0 = MatrixXd::Constant(2, 3, 1.0);
        for (int m = 0; m < 2; ++m)
            for (int k = 0; k < 3; ++k) eta0(m, k) = 1.0 / (3.0 * e0.gamma(m, k));
        auto res = ris_se(none, e0, pb, eta0, VectorXd::Ones(3), 10.0, 10.0, 0.5, 0.5);

        // independent direct-only evaluation: all trace terms vanish
        for (int k = 0; k < 3; ++k) {
            double num = 10.0 * std::pow(e0.gamma.col(k).sum(), 2);
            double den = e0.gamma.col(k).sum();
            for (int kp = 0; kp < 3; ++kp)
                for (int m = 0; m < 2; ++m)
                    den += 10.0 * e0.gamma(m, k) * e0.delta(m, kp);
            for (int kp : pb.copilot[k]) {
                if (kp == k) continue;
                double coh = 0.0;
                for (int m = 0; m < 2; ++m) coh += e0.c(m, k) * e0.delta(m, kp);
                den += pb.tau_up * pb.rho_p * 10.0 * coh * coh;
            }
            CHECK(res.ul_se(k) == Catch::Approx(0.5 * std::log2(1.0 + num / den)).epsilon(1e-12));
        }
    }
    SECTION("all SINR ingredients stay nonnegative") {
        auto res = ris_se(r, e, pb, eta, VectorXd::Ones(3), 10.0, 10.0, 0.5, 0.5);
        CHECK((res.ul_se.array() >= 0.0).all());
        CHECK((res.dl_se.array() >= 0.0).all());
    }
}

TEST_CASE("direct-link blocking") {
    MatrixXd beta = MatrixXd::Constant(10, 10, 2.0);
    SECTION("degenerate probabilities") {
        CHECK((ris_blocking(beta, 1.0, 1) - beta).cwiseAbs().maxCoeff() == 0.0);
        CHECK(ris_blocking(beta, 0.0, 2).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("unblocked fraction matches the Bernoulli rate") {
        long kept = 0, total = 0;
        for (int s = 0; s < 1000; ++s) {
            MatrixXd b = ris_blocking(beta, 0.2, 100 + s);
            kept += (b.array() > 0.0).count();
            total += 100;
        }
        const double frac = double(kept) / double(total);
        CHECK(frac == Catch::Approx(0.2).margin(0.005));
    }
}
