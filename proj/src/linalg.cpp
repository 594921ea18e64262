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

#include "rydqec/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "rydqec/errors.hpp"

namespace rydqec {

CMat kron(const CMat &a, const CMat &b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

CVec vec(const CMat &op) {
    CVec v(op.rows() * op.cols());
    for (Eigen::Index i = 0; i < op.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.cols(); ++j) {
            v[i * op.cols() + j] = op(i, j);
        }
    }
    return v;
}

CMat unvec(const CVec &v, int dim) {
    require(v.size() == static_cast<Eigen::Index>(dim) * dim, "unvec: size mismatch");
    CMat op(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            op(i, j) = v[i * dim + j];
        }
    }
    return op;
}

CMat unitary_superop(const CMat &u) {
    return kron(u, u.conjugate());
}

CMat kraus_to_superop(std::span<const CMat> kraus) {
    require(!kraus.empty(), "kraus_to_superop: empty Kraus set");
    const auto dim = kraus.front().rows();
    CMat s = CMat::Zero(dim * dim, dim * dim);
    for (const auto &k : kraus) {
        s += kron(k, k.conjugate());
    }
    return s;
}

CMat choi(const CMat &superop, int dim) {
    CMat j(dim * dim, dim * dim);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            for (int c = 0; c < dim; ++c) {
                for (int e = 0; e < dim; ++e) {
                    j(a * dim + c, b * dim + e) = superop(a * dim + b, c * dim + e);
                }
            }
        }
    }
    return j;
}

std::vector<CMat> superop_to_kraus(const CMat &superop, int dim, double drop_below) {
    CMat j = choi(superop, dim);
    CMat herm = 0.5 * (j + j.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm);
    std::vector<CMat> kraus;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        double w = eig.eigenvalues()[k];
        if (w <= drop_below) {
            continue;
        }
        CVec v = std::sqrt(w) * eig.eigenvectors().col(k);
        kraus.push_back(unvec(v, dim));
    }
    return kraus;
}

double trace_preservation_error(const CMat &superop, int dim) {
    double worst = 0;
    for (int k = 0; k < dim; ++k) {
        for (int l = 0; l < dim; ++l) {
            cplx t = 0;
            for (int i = 0; i < dim; ++i) {
                t += superop(i * dim + i, k * dim + l);
            }
            worst = std::max(worst, std::abs(t - (k == l ? 1.0 : 0.0)));
        }
    }
    return worst;
}

double min_choi_eigenvalue(const CMat &superop, int dim) {
    CMat j = choi(superop, dim);
    CMat herm = 0.5 * (j + j.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

double trace_distance(const CMat &a, const CMat &b) {
    CMat diff = a - b;
    CMat herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(herm, Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

}  // namespace rydqec
