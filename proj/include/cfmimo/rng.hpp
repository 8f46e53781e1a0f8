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

#ifndef CFMIMO_RNG_HPP
#define CFMIMO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "cfmimo/common.hpp"

namespace cfmimo {

// splitmix64 finalizer, used to derive independent child seeds. Results must
// not depend on worker scheduling, so every trial/stream gets its own seed
// derived from (master, ids) instead of sharing one engine.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(master ^ 0x2545f4914f6cdd1dULL) ^ mix64(a) ^ mix64(mix64(b)));
}

// Thin wrapper around mt19937_64 with hand-rolled double/Gaussian conversion.
// std::normal_distribution is implementation-defined, which would break the
// bit-identical reproducibility contract, so Box-Muller is done explicitly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in (0, 1]; never returns 0 so log() below is safe
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection sampling keeps the result independent of library internals
        const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= lim);
        return x % n;
    }

    // standard normal N(0,1)
    double gauss() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // circularly symmetric CN(0,1): one Box-Muller pair feeds both parts
    cxd cgauss() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));  // = sqrt(-2 ln u) / sqrt(2)
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

    VectorXcd cgauss_vector(int n) {
        VectorXcd v(n);
        for (int i = 0; i < n; ++i) v(i) = cgauss();
        return v;
    }

    MatrixXcd cgauss_matrix(int rows, int cols) {
        MatrixXcd m(rows, cols);
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = cgauss();
        return m;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace cfmimo

#endif
