// Copyright 2026 The rydqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rydqec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3cd;
using Mat9 = Eigen::Matrix<cplx, 9, 9>;

inline constexpr cplx kI{0.0, 1.0};

// Operators are vectorized row-major: vec(rho)[i * dim + j] = rho(i, j). With this convention the
// superoperator of rho -> K rho K^dagger is kron(K, conj(K)).

CMat kron(const CMat &a, const CMat &b);
CVec vec(const CMat &op);
CMat unvec(const CVec &v, int dim);

CMat unitary_superop(const CMat &u);
CMat kraus_to_superop(std::span<const CMat> kraus);

/// Choi matrix J[(i,k),(j,l)] = S[(i,j),(k,l)]; positive semidefinite iff S is completely positive.
CMat choi(const CMat &superop, int dim);
std::vector<CMat> superop_to_kraus(const CMat &superop, int dim, double drop_below = 1e-14);

/// max_{k,l} |sum_i S[(i,i),(k,l)] - delta_kl|.
double trace_preservation_error(const CMat &superop, int dim);
double min_choi_eigenvalue(const CMat &superop, int dim);

double trace_distance(const CMat &a, const CMat &b);

/// Haar-random pure state of the given dimension as a density operator.
template <class Rng>
CMat random_pure_state(int dim, Rng &rng);

}  // namespace rydqec

#include <random>

namespace rydqec {

template <class Rng>
CMat random_pure_state(int dim, Rng &rng) {
    std::normal_distribution<double> normal;
    CVec psi(dim);
    for (int i = 0; i < dim; ++i) {
        psi[i] = cplx(normal(rng), normal(rng));
    }
    psi.normalize();
    return psi * psi.adjoint();
}

}  // namespace rydqec
