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

#ifndef CFMIMO_COMMON_HPP
#define CFMIMO_COMMON_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>

namespace cfmimo {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// Error taxonomy shared by the whole toolkit. CLI maps these to exit codes.
struct invalid_argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct invalid_configuration_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct infeasible_problem_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numerical_domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double log2_1p(double sinr) { return std::log2(1.0 + sinr); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw invalid_argument_error(msg);
}

// Per-UE SINR/SE plus aggregates; the prelog factor is already applied to se.
struct SEReport {
    VectorXd sinr;
    VectorXd se;  // bit/s/Hz
    double sum_se = 0.0;
    double min_se = 0.0;

    static SEReport from_sinr(const VectorXd& sinr, double prelog) {
        SEReport r;
        r.sinr = sinr;
        r.se = sinr.unaryExpr([prelog](double s) { return prelog * std::log2(1.0 + s); });
        r.sum_se = r.se.sum();
        r.min_se = r.se.size() ? r.se.minCoeff() : 0.0;
        return r;
    }
    static SEReport from_se(const VectorXd& se) {
        SEReport r;
        r.se = se;
        r.sinr = se.unaryExpr([](double) { return 0.0; });
        r.sum_se = se.sum();
        r.min_se = se.size() ? se.minCoeff() : 0.0;
        return r;
    }
};

// PSD square-root factor (R = L L^H); LLT fast path with an eigenvalue
// fallback for rank-deficient inputs. Throws on indefinite matrices.
inline MatrixXcd psd_sqrt(const MatrixXcd& R) {
    if (R.cwiseAbs().maxCoeff() == 0.0) return MatrixXcd::Zero(R.rows(), R.cols());
    Eigen::LLT<MatrixXcd> llt(R);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(R);
    if (es.info() != Eigen::Success)
        throw numerical_domain_error("psd_sqrt: eigen decomposition failed");
    VectorXd ev = es.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-10 * scale)
            throw numerical_domain_error("psd_sqrt: matrix is not positive semidefinite");
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return es.eigenvectors() * ev.asDiagonal();
}

}  // namespace cfmimo

#endif
