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

#ifndef CFMIMO_POWERCTRL_HPP
#define CFMIMO_POWERCTRL_HPP

#include <functional>
#include <utility>
#include <vector>

#include "cfmimo/socp.hpp"

namespace cfmimo {

// Closed-form SINR in the sqrt-power variables mu:
//   SINR(mu) = (c . mu)^2 / ( ||D mu||^2 + sum_i q_i mu_i^2 + sigma )
// The numerator is affine in mu, the denominator affine in mu^2 plus optional
// extra coherent terms D, which makes the per-UE target constraint a
// second-order cone.
struct SinrConstraint {
    VectorXd c;
    MatrixXd D;      // 0 x n when absent
    VectorXd q;
    double sigma = 1.0;

    double evaluate(const VectorXd& mu) const {
        const double num = c.dot(mu);
        double den = sigma + (q.array() * mu.array().square()).sum();
        if (D.rows() > 0) den += (D * mu).squaredNorm();
        return den > 0.0 ? num * num / den : 0.0;
    }
};

// Per-AP power constraints sum_{i in idx_m} g_i mu_i^2 <= zeta_m, mu >= 0
struct PowerConstraintSet {
    std::vector<std::vector<int>> idx;
    std::vector<VectorXd> g;
    std::vector<double> zeta;

    bool satisfied(const VectorXd& mu, double tol = 1e-8) const {
        if ((mu.array() < -tol).any()) return false;
        for (std::size_t m = 0; m < idx.size(); ++m) {
            double s = 0.0;
            for (std::size_t j = 0; j < idx[m].size(); ++j)
                s += g[m](j) * mu(idx[m][j]) * mu(idx[m][j]);
            if (s > zeta[m] * (1.0 + tol) + tol) return false;
        }
        return true;
    }

    // exact projection: clip negatives, then per-AP ellipsoid projection
    VectorXd project(VectorXd mu) const {
        mu = mu.cwiseMax(0.0);
        for (std::size_t m = 0; m < idx.size(); ++m) {
            const int n = static_cast<int>(idx[m].size());
            VectorXd x(n);
            for (int j = 0; j < n; ++j) x(j) = mu(idx[m][j]);
            double s = (g[m].array() * x.array().square()).sum();
            if (s <= zeta[m]) continue;
            // solve sum g x^2/(1+lam g)^2 = zeta for lam >= 0 by bisection
            double lo = 0.0, hi = 1.0;
            auto val = [&](double lam) {
                return (g[m].array() * (x.array() / (1.0 + lam * g[m].array())).square()).sum();
            };
            while (val(hi) > zeta[m]) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (val(mid) > zeta[m] ? lo : hi) = mid;
            }
            const double lam = 0.5 * (lo + hi);
            for (int j = 0; j < n; ++j) mu(idx[m][j]) = x(j) / (1.0 + lam * g[m](j));
        }
        return mu;
    }

    // per-AP budget fully used, split equally over its entries
    VectorXd uniform_full_power(int n) const {
        VectorXd mu = VectorXd::Zero(n);
        for (std::size_t m = 0; m < idx.size(); ++m) {
            for (std::size_t j = 0; j < idx[m].size(); ++j) {
                const double gj = g[m](j);
                if (gj > 0.0)
                    mu(idx[m][j]) = std::sqrt(zeta[m] / (idx[m].size() * gj));
            }
        }
        return mu;
    }
};

enum class PowerObjective { MAXMIN, SUMSE, PROPFAIR, EE };

struct PowerProblem {
    PowerObjective objective = PowerObjective::MAXMIN;
    std::vector<SinrConstraint> sinr;
    PowerConstraintSet constraints;
    double prelog = 1.0;
    int num_vars = 0;

    void validate() const {
        require(num_vars > 0, "PowerProblem: empty variable space");
        VectorXd tiny = VectorXd::Constant(num_vars, 1e-9);
        require(constraints.satisfied(constraints.project(tiny)),
                "PowerProblem: feasible set is empty at the origin");
    }
};

struct MaxMinResult {
    VectorXd mu;
    double min_sinr = 0.0;
    std::vector<std::pair<double, bool>> trace;  // (t, feasible)
    int bisection_iterations = 0;
};

namespace detail {

// assemble the fixed cone blocks; the per-UE SOC scaling sqrt(t) is mutated
// between bisection steps so the factorization survives
inline ConeFeasibility build_feasibility(const PowerProblem& p, std::vector<std::size_t>* ue_blocks) {
    const int n = p.num_vars;
    std::vector<ConeFeasibility::Block> blocks;

    ConeFeasibility::Block nn;
    nn.type = ConeFeasibility::ConeType::NONNEG;
    nn.A = MatrixXd::Identity(n, n);
    nn.b = VectorXd::Zero(n);
    blocks.push_back(std::move(nn));

    for (std::size_t m = 0; m < p.constraints.idx.size(); ++m) {
        const auto& idx = p.constraints.idx[m];
        ConeFeasibility::Block blk;
        blk.type = ConeFeasibility::ConeType::SOC;
        blk.alpha = 1.0;
        const double scale = 1.0 / std::sqrt(std::max(p.constraints.zeta[m], 1e-300));
        blk.A = MatrixXd::Zero(1 + idx.size(), n);
        blk.b = VectorXd::Zero(1 + idx.size());
        blk.b(0) = 1.0;  // = sqrt(zeta) * scale
        for (std::size_t j = 0; j < idx.size(); ++j)
            blk.A(1 + j, idx[j]) = std::sqrt(p.constraints.g[m](j)) * scale;
        blocks.push_back(std::move(blk));
    }

    for (const auto& s : p.sinr) {
        ConeFeasibility::Block blk;
        blk.type = ConeFeasibility::ConeType::SOC;
        const double scale = 1.0 / std::max(s.c.norm(), 1e-300);
        const int extra = static_cast<int>(s.D.rows());
        blk.A = MatrixXd::Zero(1 + extra + n + 1, n);
        blk.b = VectorXd::Zero(1 + extra + n + 1);
        blk.A.row(0) = scale * s.c.transpose();
        if (extra > 0) blk.A.middleRows(1, extra) = scale * s.D;
        for (int i = 0; i < n; ++i) blk.A(1 + extra + i, i) = scale * std::sqrt(s.q(i));
        blk.b(1 + extra + n) = scale * std::sqrt(s.sigma);
        if (ue_blocks) ue_blocks->push_back(blocks.size());
        blocks.push_back(std::move(blk));
    }
    return ConeFeasibility(n, std::move(blocks));
}

}  // namespace detail

namespace detail {

inline VectorXd sinr_gradient(const SinrConstraint& s, const VectorXd& mu, double* sinr_out) {
    const double num = s.c.dot(mu);
    double den = s.sigma + (s.q.array() * mu.array().square()).sum();
    VectorXd dden = 2.0 * s.q.array().cwiseProduct(mu.array());
    if (s.D.rows() > 0) {
        VectorXd dmu = s.D * mu;
        den += dmu.squaredNorm();
        dden += 2.0 * (s.D.transpose() * dmu);
    }
    if (sinr_out) *sinr_out = num * num / den;
    return (2.0 * num / den) * s.c - (num * num / (den * den)) * dden;
}

// rescale the sqrt-power variables to O(1): x_i = mu_i / s_i with s_i the
// per-variable full-power magnitude; SINRs are invariant under the paired
// rescale of (c, D, q) and the per-AP quadratic weights
inline PowerProblem scale_problem(const PowerProblem& p, VectorXd* scale_out) {
    VectorXd s = p.constraints.uniform_full_power(p.num_vars);
    for (int i = 0; i < s.size(); ++i)
        if (s(i) <= 0.0) s(i) = 1.0;
    PowerProblem q = p;
    for (auto& c : q.sinr) {
        c.c = c.c.cwiseProduct(s);
        c.q = c.q.cwiseProduct(s.cwiseProduct(s));
        for (int r = 0; r < c.D.rows(); ++r) c.D.row(r) = c.D.row(r).cwiseProduct(s.transpose());
    }
    for (std::size_t m = 0; m < q.constraints.idx.size(); ++m)
        for (std::size_t j = 0; j < q.constraints.idx[m].size(); ++j) {
            const double sj = s(q.constraints.idx[m][j]);
            q.constraints.g[m](j) *= sj * sj;
        }
    *scale_out = s;
    return q;
}

}  // namespace detail

// Bisection over the common SINR target t; each feasibility subproblem is a
// cone program solved by operator splitting, and candidate points are verified
// directly against the closed-form SINRs before a target is declared feasible.
inline MaxMinResult solve_maxmin_bisection(const PowerProblem& problem, double rel_tol = 1e-4,
                                           int max_bisect = 60, int admm_iters = 4000) {
    require(rel_tol > 0.0, "solve_maxmin_bisection: tol must be positive");
    problem.validate();
    const int n = problem.num_vars;

    VectorXd scale;
    const PowerProblem sp = detail::scale_problem(problem, &scale);
    std::vector<std::size_t> ue_blocks;
    ConeFeasibility feas = detail::build_feasibility(sp, &ue_blocks);

    auto min_sinr_at = [&](const VectorXd& mu) {
        double v = 1e300;
        for (const auto& s : sp.sinr) v = std::min(v, s.evaluate(mu));
        return v;
    };

    // annealed soft-min ascent inside the feasible set; monotone in the true
    // minimum, so it can only improve its starting point. Used to sharpen the
    // splitting iterate near thin feasible sets and as the final polish.
    auto balance = [&](VectorXd mu, int rounds) {
        double best = min_sinr_at(mu);
        for (double rel_tau : {0.3, 0.1, 0.03, 0.01}) {
            double step = 0.05;
            int stale = 0;
            for (int it = 0; it < rounds && stale < 12 && step > 1e-12; ++it) {
                const double tau = std::max(rel_tau * best, 1e-300);
                VectorXd dir = VectorXd::Zero(sp.num_vars);
                double wsum = 0.0;
                for (const auto& s : sp.sinr) {
                    double v;
                    VectorXd g = detail::sinr_gradient(s, mu, &v);
                    const double w = std::exp(-(v - best) / tau);
                    dir += w * g;
                    wsum += w;
                }
                if (wsum <= 0.0) break;
                dir /= wsum;
                const double gn = dir.norm();
                if (gn <= 0.0) break;
                VectorXd cand =
                    sp.constraints.project(mu + (step * std::max(mu.norm(), 1.0) / gn) * dir);
                const double v = min_sinr_at(cand);
                if (v > best) {
                    mu = cand;
                    best = v;
                    step *= 1.3;
                    stale = 0;
                } else {
                    step *= 0.6;
                    ++stale;
                }
            }
        }
        return mu;
    };

    // verification slack: the returned minimum is re-evaluated exactly, so a
    // slightly loose acceptance here only biases which probes count feasible
    const double slack = 1e-4;
    auto verified = [&](const VectorXd& x, double t, VectorXd* out) {
        VectorXd mu = sp.constraints.project(x);
        for (const auto& s : sp.sinr)
            if (s.evaluate(mu) < t * (1.0 - slack) - 1e-15) return false;
        if (out) *out = mu;
        return true;
    };

    auto try_target = [&](double t, VectorXd* out) {
        for (std::size_t i = 0; i < ue_blocks.size(); ++i)
            feas.set_alpha(ue_blocks[i], std::sqrt(t));
        const int chunk = 100;
        double prev_resid = 1e300;
        int plateau = 0;
        for (int used = 0; used < admm_iters; used += chunk) {
            auto r = feas.solve(chunk, 1e-10);
            if (verified(r.x, t, out)) return true;
            if (r.converged) break;
            // infeasible targets leave the splitting residual stuck at a
            // positive level; bail out once it stops improving
            plateau = r.residual > 0.99 * prev_resid ? plateau + 1 : 0;
            prev_resid = r.residual;
            if (plateau >= 5 && r.residual > 1e-6) break;
        }
        if (verified(feas.current(), t, out)) return true;
        // near-feasible rescue: a short balancing ascent from the projected
        // iterate resolves targets whose feasible set is too thin for the
        // splitting tail
        VectorXd rescued = balance(sp.constraints.project(feas.current()), 60);
        return verified(rescued, t, out);
    };

    MaxMinResult res;
    VectorXd x_uniform = VectorXd::Ones(n);  // scaled uniform full power
    res.mu = sp.constraints.project(x_uniform);
    double best_feasible = 1e300;
    for (const auto& s : sp.sinr) best_feasible = std::min(best_feasible, s.evaluate(res.mu));
    double t_lo = best_feasible;  // achieved by the uniform point, hence feasible
    res.min_sinr = t_lo;

    double t_hi = 0.0;
    for (const auto& s : sp.sinr) t_hi = std::max(t_hi, s.evaluate(res.mu));
    t_hi = std::max(t_hi * sp.sinr.size(), t_lo * 2.0 + 1e-12);
    if (t_hi <= 0.0 && best_feasible <= 0.0)
        throw infeasible_problem_error("solve_maxmin_bisection: zero SINR at full power");

    VectorXd candidate;
    ConeFeasibility::State good = feas.snapshot();
    for (int it = 0; it < max_bisect; ++it) {
        if (t_hi - t_lo <= rel_tol * std::max(t_hi, 1e-12)) break;
        const double t = 0.5 * (t_lo + t_hi);
        const bool ok = try_target(t, &candidate);
        res.trace.emplace_back(t, ok);
        ++res.bisection_iterations;
        if (ok) {
            t_lo = t;
            res.mu = candidate;
            res.min_sinr = t;
            good = feas.snapshot();  // warm start future probes from here
        } else {
            t_hi = t;
            feas.restore(good);
        }
    }
    res.mu = balance(res.mu, 150);  // final polish
    res.min_sinr = min_sinr_at(res.mu);
    res.mu = res.mu.cwiseProduct(scale);  // back to the original variables
    return res;
}

// bisection trace as CSV rows: iteration, target, feasible
inline std::string maxmin_trace_csv(const MaxMinResult& r) {
    std::string out = "iteration,t,feasible\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i)
        out += std::to_string(i) + "," + std::to_string(r.trace[i].first) + "," +
               (r.trace[i].second ? "1" : "0") + "\n";
    return out;
}

struct GradientResult {
    VectorXd mu;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool stagnated = false;
};

namespace detail {

inline GradientResult projected_gradient_ascent(const PowerProblem& p,
                                                const std::function<double(const VectorXd&)>& f,
                                                const std::function<VectorXd(const VectorXd&)>& grad,
                                                VectorXd mu0, int max_iter) {
    GradientResult res;
    VectorXd mu = p.constraints.project(std::move(mu0));
    double fv = f(mu);
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;
        VectorXd g = grad(mu);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            VectorXd cand = p.constraints.project(mu + step * g);
            const double fc = f(cand);
            if (fc > fv + 1e-12 * std::abs(fv)) {
                mu = cand;
                fv = fc;
                step *= 1.6;
                accepted = true;
                break;
            }
            step *= 0.5;
            if (step < 1e-12) break;
        }
        if (!accepted) {
            res.stagnated = step < 1e-12;
            break;
        }
    }
    res.mu = mu;
    res.objective = fv;
    res.kkt_residual = (p.constraints.project(mu + grad(mu)) - mu).norm();
    return res;
}

}  // namespace detail

inline GradientResult solve_sumse_pgd(const PowerProblem& problem, int max_iter = 400) {
    problem.validate();
    VectorXd scale;
    const PowerProblem sp = detail::scale_problem(problem, &scale);
    auto f = [&](const VectorXd& mu) {
        double v = 0.0;
        for (const auto& s : sp.sinr) v += sp.prelog * log2_1p(s.evaluate(mu));
        return v;
    };
    auto grad = [&](const VectorXd& mu) {
        VectorXd g = VectorXd::Zero(sp.num_vars);
        for (const auto& s : sp.sinr) {
            double sinr;
            VectorXd ds = detail::sinr_gradient(s, mu, &sinr);
            g += (sp.prelog / ((1.0 + sinr) * M_LN2)) * ds;
        }
        return g;
    };
    GradientResult r = detail::projected_gradient_ascent(sp, f, grad, VectorXd::Ones(sp.num_vars),
                                                         max_iter);
    r.mu = r.mu.cwiseProduct(scale);
    return r;
}

// geometric-mean fairness: maximize sum_k log2(SE_k); requires interior start
inline GradientResult solve_propfair_pgd(const PowerProblem& problem, int max_iter = 400) {
    problem.validate();
    VectorXd scale;
    const PowerProblem sp = detail::scale_problem(problem, &scale);
    auto f = [&](const VectorXd& mu) {
        double v = 0.0;
        for (const auto& s : sp.sinr) {
            const double se = sp.prelog * log2_1p(s.evaluate(mu));
            if (se <= 0.0) return -1e300;
            v += std::log2(se);
        }
        return v;
    };
    auto grad = [&](const VectorXd& mu) {
        VectorXd g = VectorXd::Zero(sp.num_vars);
        for (const auto& s : sp.sinr) {
            double sinr;
            VectorXd ds = detail::sinr_gradient(s, mu, &sinr);
            const double se = sp.prelog * log2_1p(sinr);
            if (se <= 0.0) continue;
            g += (sp.prelog / (se * M_LN2 * (1.0 + sinr) * M_LN2)) * ds;
        }
        return g;
    };
    GradientResult r = detail::projected_gradient_ascent(sp, f, grad, VectorXd::Ones(sp.num_vars),
                                                         max_iter);
    // report the geometric mean of the SEs
    double logsum = 0.0;
    for (const auto& s : sp.sinr)
        logsum += std::log(std::max(sp.prelog * log2_1p(s.evaluate(r.mu)), 1e-300));
    r.objective = std::exp(logsum / sp.sinr.size());
    r.mu = r.mu.cwiseProduct(scale);
    return r;
}

// Total power model with traffic-dependent fronthaul load
struct PowerModel {
    VectorXd ap_transceiver_power;  // watts, per AP
    VectorXd fronthaul_fixed;       // P_{0,m}, watts
    VectorXd fronthaul_per_bit;     // P_{bt,m}, watts per bit/s
    VectorXd ue_circuit_power;      // watts
    double bandwidth_hz = 20e6;

    void validate() const {
        require(ap_transceiver_power.minCoeff() >= 0.0 && fronthaul_fixed.minCoeff() >= 0.0 &&
                    fronthaul_per_bit.minCoeff() >= 0.0 && bandwidth_hz > 0.0 &&
                    (ue_circuit_power.size() == 0 || ue_circuit_power.minCoeff() >= 0.0),
                "PowerModel: negative component");
    }
};

// EE = B SE / P_total with P_total = transmit + transceiver + UE circuits +
// fronthaul (fixed + traffic-dependent), summed over active APs only.
inline double total_ee(double se_sum, const PowerModel& pm, const VectorXd& ap_transmit_watts,
                       const std::vector<bool>& active) {
    pm.validate();
    require(se_sum >= 0.0, "total_ee: negative SE");
    const double rate = pm.bandwidth_hz * se_sum;  // bit/s
    double total = pm.ue_circuit_power.size() ? pm.ue_circuit_power.sum() : 0.0;
    for (int m = 0; m < ap_transmit_watts.size(); ++m) {
        if (!active[m]) continue;
        total += ap_transmit_watts(m) + pm.ap_transceiver_power(m) + pm.fronthaul_fixed(m) +
                 rate * pm.fronthaul_per_bit(m);
    }
    require(total > 0.0, "total_ee: total power is zero");
    return rate / total;
}

// CB downlink max-min structure over uncorrelated fading: variables are the
// sqrt-power coefficients mu_{mk}, per-AP constraint sum_k gamma_mk mu^2 <= 1/N
inline PowerProblem make_cb_dl_problem(const MatrixXd& beta, const MatrixXd& gamma, double rho_d,
                                       int N, double prelog) {
    const int M = static_cast<int>(beta.rows()), K = static_cast<int>(beta.cols());
    PowerProblem p;
    p.num_vars = M * K;
    p.prelog = prelog;
    auto id = [K](int m, int k) { return m * K + k; };
    p.sinr.resize(K);
    for (int k = 0; k < K; ++k) {
        auto& s = p.sinr[k];
        s.c = VectorXd::Zero(M * K);
        s.q = VectorXd::Zero(M * K);
        s.D = MatrixXd::Zero(0, M * K);
        s.sigma = 1.0;
        for (int m = 0; m < M; ++m) {
            s.c(id(m, k)) = N * std::sqrt(rho_d) * gamma(m, k);
            for (int kp = 0; kp < K; ++kp) s.q(id(m, kp)) = rho_d * N * beta(m, k) * gamma(m, kp);
        }
    }
    p.constraints.idx.resize(M);
    p.constraints.g.resize(M);
    p.constraints.zeta.assign(M, 1.0 / N);
    for (int m = 0; m < M; ++m) {
        p.constraints.g[m] = VectorXd::Zero(K);
        for (int k = 0; k < K; ++k) {
            p.constraints.idx[m].push_back(id(m, k));
            p.constraints.g[m](k) = gamma(m, k);
        }
    }
    return p;
}

}  // namespace cfmimo

#endif
