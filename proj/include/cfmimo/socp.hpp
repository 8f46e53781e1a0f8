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

#ifndef CFMIMO_SOCP_HPP
#define CFMIMO_SOCP_HPP

#include <vector>

#include <Eigen/Sparse>

#include "cfmimo/common.hpp"

namespace cfmimo {

// Second-order-cone feasibility: find x with A_i x + b_i in K_i for every
// block, where K_i is the nonnegative orthant or the scaled cone
// { (y0, yr) : y0 >= alpha ||yr|| }. Solved by consensus ADMM over the
// stacked sparse constraint matrix; the normal-equation factorization is
// reused across solves with different cone scalings (bisection over alpha),
// and (x, z, u) survive between solves as a warm start.
class ConeFeasibility {
  public:
    enum class ConeType { NONNEG, SOC };

    struct Block {
        ConeType type = ConeType::SOC;
        MatrixXd A;  // dense input, stored sparse internally
        VectorXd b;
        double alpha = 1.0;
    };

    struct Result {
        bool converged = false;
        VectorXd x;
        double residual = 0.0;
        int iterations = 0;
    };

    ConeFeasibility(int n, const std::vector<Block>& blocks, double reg = 1e-10) : n_(n) {
        int rows = 0;
        std::vector<Eigen::Triplet<double>> trips;
        for (const auto& blk : blocks) {
            require(blk.A.cols() == n_, "ConeFeasibility: block width mismatch");
            require(blk.A.rows() == blk.b.size(), "ConeFeasibility: block b mismatch");
            BlockMeta meta;
            meta.type = blk.type;
            meta.alpha = blk.alpha;
            meta.offset = rows;
            meta.rows = static_cast<int>(blk.A.rows());
            meta_.push_back(meta);
            for (int r = 0; r < blk.A.rows(); ++r)
                for (int c = 0; c < n_; ++c)
                    if (blk.A(r, c) != 0.0) trips.emplace_back(rows + r, c, blk.A(r, c));
            rows += static_cast<int>(blk.A.rows());
        }
        total_rows_ = rows;
        b_ = VectorXd::Zero(rows);
        for (std::size_t i = 0; i < blocks.size(); ++i)
            b_.segment(meta_[i].offset, meta_[i].rows) = blocks[i].b;

        A_.resize(rows, n_);
        A_.setFromTriplets(trips.begin(), trips.end());
        A_.makeCompressed();
        At_ = A_.transpose();

        MatrixXd normal = MatrixXd(At_ * A_) + reg * MatrixXd::Identity(n_, n_);
        llt_.compute(normal);
        if (llt_.info() != Eigen::Success)
            throw numerical_domain_error("ConeFeasibility: singular normal matrix");
        reset();
    }

    void set_alpha(std::size_t block, double alpha) { meta_[block].alpha = alpha; }

    void reset() {
        x_ = VectorXd::Zero(n_);
        z_ = VectorXd::Zero(total_rows_);
        u_ = VectorXd::Zero(total_rows_);
    }

    struct State {
        VectorXd x, z, u;
    };
    State snapshot() const { return {x_, z_, u_}; }
    void restore(const State& s) {
        x_ = s.x;
        z_ = s.z;
        u_ = s.u;
    }

    Result solve(int max_iter = 2000, double tol = 1e-9) {
        Result res;
        for (int it = 0; it < max_iter; ++it) {
            x_ = llt_.solve(At_ * (z_ - u_ - b_));
            VectorXd ax = A_ * x_ + b_;
            VectorXd v = ax + u_;
            double resid = 0.0;
            for (const auto& m : meta_) {
                project_segment(m, v);
                // v now holds z on this segment
            }
            z_ = v;
            VectorXd r = ax - z_;
            u_ += r;
            resid = r.lpNorm<Eigen::Infinity>();
            res.iterations = it + 1;
            res.residual = resid;
            if (resid < tol) {
                res.converged = true;
                break;
            }
        }
        res.x = x_;
        return res;
    }

    const VectorXd& current() const { return x_; }

  private:
    struct BlockMeta {
        ConeType type;
        double alpha;
        int offset, rows;
    };

    static void project_segment(const BlockMeta& m, VectorXd& v) {
        if (m.type == ConeType::NONNEG) {
            v.segment(m.offset, m.rows) = v.segment(m.offset, m.rows).cwiseMax(0.0);
            return;
        }
        const double alpha = m.alpha;
        const double s = v(m.offset);
        const int r = m.rows - 1;
        const double nx = r > 0 ? v.segment(m.offset + 1, r).norm() : 0.0;
        if (alpha <= 0.0) {
            v(m.offset) = std::max(s, 0.0);
            return;
        }
        if (s >= alpha * nx) return;
        if (alpha * s <= -nx) {
            v.segment(m.offset, m.rows).setZero();
            return;
        }
        const double beta = (alpha * s + nx) / (1.0 + alpha * alpha);
        v(m.offset) = alpha * beta;
        if (nx > 0.0) v.segment(m.offset + 1, r) *= beta / nx;
    }

    int n_ = 0;
    int total_rows_ = 0;
    std::vector<BlockMeta> meta_;
    Eigen::SparseMatrix<double> A_, At_;
    VectorXd b_;
    Eigen::LLT<MatrixXd> llt_;
    VectorXd x_, z_, u_;
};

}  // namespace cfmimo

#endif
