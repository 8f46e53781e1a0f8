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

#include "cfmimo/lemmas.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

namespace {
MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    Rng rng(seed);
    MatrixXcd A = rng.cgauss_matrix(n, n);
    return 0.5 * (A + A.adjoint().eval());
}
MatrixXcd random_psd(int n, std::uint64_t seed) {
    Rng rng(seed);
    MatrixXcd A = rng.cgauss_matrix(n, n);
    return A * A.adjoint();
}
}  // namespace

TEST_CASE("trace quadratic form") {
    SECTION("identity matrix") {
        auto r = check_trace_lemma(8, MatrixXcd::Identity(8, 8), 20000, 1);
        CHECK(r.target == Catch::Approx(1.0));
        CHECK(r.passed);
    }
    SECTION("zero matrix is exact") {
        auto r = check_trace_lemma(4, MatrixXcd::Zero(4, 4), 1000, 2);
        CHECK(r.statistic == 0.0);
        CHECK(r.passed);
    }
    SECTION("random Hermitian, within three standard errors") {
        MatrixXcd A = random_hermitian(16, 3);
        auto r = check_trace_lemma(16, A, 100000, 4);
        CHECK(r.target == Catch::Approx(A.trace().real() / 16.0));
        CHECK(std::abs(r.statistic - r.target) < 3.0 * (r.tolerance / 5.0));
    }
    SECTION("independent vectors decorrelate") {
        auto r = check_trace_lemma_cross(16, random_hermitian(16, 5), 100000, 6);
        CHECK(r.target == 0.0);
        CHECK(r.passed);
    }
    SECTION("quadratic-form variance decays like 1/M") {
        // stderr^2 * trials estimates the per-trial variance
        double var_prev = 1e300;
        for (int M : {4, 16, 64}) {
            auto r = check_trace_lemma(M, MatrixXcd::Identity(M, M), 20000, 7);
            const double stderr_mean = r.tolerance / 5.0;
            const double var = stderr_mean * stderr_mean * 20000;
            CHECK(var < var_prev / 2.0);
            var_prev = var;
        }
    }
}

TEST_CASE("wishart inverse trace") {
    SECTION("K=2 N=4 target") {
        auto r = check_wishart_inverse_trace(2, 4, 100000, 11);
        CHECK(r.target == Catch::Approx(1.0));
        CHECK(r.passed);
    }
    SECTION("K=1 N=2 target") {
        auto r = check_wishart_inverse_trace(1, 2, 50000, 12);
        CHECK(r.target == Catch::Approx(1.0));
        CHECK(r.passed);
    }
    SECTION("K=4 N=16 within three standard errors") {
        auto r = check_wishart_inverse_trace(4, 16, 100000, 13);
        CHECK(r.target == Catch::Approx(4.0 / 12.0));
        CHECK(std::abs(r.statistic - r.target) < 3.0 * (r.tolerance / 5.0));
    }
    SECTION("diverging expectation rejected") {
        CHECK_THROWS_AS(check_wishart_inverse_trace(4, 4, 10, 14), invalid_argument_error);
    }
}

TEST_CASE("quadratic form mean") {
    SECTION("zero mean identity") {
        auto r = check_quadratic_form_mean(VectorXcd::Zero(3), MatrixXcd::Identity(3, 3),
                                           MatrixXcd::Identity(3, 3), 50000, 21);
        CHECK(r.target == Catch::Approx(3.0));
        CHECK(r.passed);
    }
    SECTION("deterministic vector, zero covariance") {
        Rng rng(22);
        VectorXcd mu = rng.cgauss_vector(3);
        MatrixXcd B = random_psd(3, 23);
        auto r = check_quadratic_form_mean(mu, MatrixXcd::Zero(3, 3), B, 500, 24);
        CHECK(r.statistic == Catch::Approx(r.target).epsilon(1e-12));
        CHECK(r.passed);
    }
    SECTION("random instance") {
        Rng rng(25);
        VectorXcd mu = rng.cgauss_vector(5);
        auto r = check_quadratic_form_mean(mu, random_psd(5, 26), random_psd(5, 27), 100000, 28);
        CHECK(std::abs(r.statistic - r.target) < 3.0 * (r.tolerance / 5.0));
    }
}

TEST_CASE("quadratic form second moment") {
    SECTION("identity pair") {
        auto r = check_quadratic_form_second_moment(MatrixXcd::Identity(2, 2),
                                                    MatrixXcd::Identity(2, 2), 100000, 31);
        CHECK(r.target == Catch::Approx(6.0));
        CHECK(r.passed);
    }
    SECTION("zero matrix is exact") {
        auto r = check_quadratic_form_second_moment(MatrixXcd::Identity(2, 2),
                                                    MatrixXcd::Zero(2, 2), 100, 32);
        CHECK(r.statistic == 0.0);
        CHECK(r.passed);
    }
    SECTION("random PSD pair") {
        auto r = check_quadratic_form_second_moment(random_psd(4, 33), random_psd(4, 34),
                                                    200000, 35);
        CHECK(std::abs(r.statistic - r.target) < 3.0 * (r.tolerance / 5.0));
    }
}

TEST_CASE("projection expectation") {
    SECTION("M=4 N=2 is half the identity") {
        auto r = check_projection_expectation(4, 2, 100000, 41);
        CHECK(r.passed);
    }
    SECTION("M=2 N=1 diagonal half") {
        auto r = check_projection_expectation(2, 1, 100000, 42);
        CHECK(r.passed);
    }
    SECTION("M=8 N=3 max-abs deviation") {
        auto r = check_projection_expectation(8, 3, 100000, 43);
        CHECK(r.statistic < 0.01);
    }
    CHECK_THROWS_AS(check_projection_expectation(3, 3, 10, 44), invalid_argument_error);
}

TEST_CASE("double quadratic form") {
    SECTION("identity instance") {
        auto r = check_double_quadratic(MatrixXcd::Identity(2, 2), MatrixXcd::Identity(2, 2),
                                        MatrixXcd::Identity(2, 2), 100000, 51);
        CHECK(r.target == Catch::Approx(6.0));
        CHECK(r.passed);
    }
    SECTION("zero factor is exact") {
        auto r = check_double_quadratic(MatrixXcd::Identity(2, 2), MatrixXcd::Zero(2, 2),
                                        MatrixXcd::Identity(2, 2), 100, 52);
        CHECK(r.statistic == 0.0);
        CHECK(r.passed);
    }
    SECTION("random instance") {
        auto r = check_double_quadratic(random_psd(4, 53), random_psd(4, 54), random_psd(4, 55),
                                        200000, 56);
        CHECK(std::abs(r.statistic - r.target) < 3.0 * (r.tolerance / 5.0));
    }
}
