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

#include <gtest/gtest.h>

#include "rydqec/errors.hpp"
#include "rydqec/pauli.hpp"

using namespace rydqec;

namespace {

CMat matrix_of(const PauliString &p) {
    CMat m = CMat::Identity(1, 1);
    for (int q = 0; q < kPauliQubits; ++q) {
        m = kron(m, pauli_matrix(p[q]));
    }
    return m;
}

CMat cz4() {
    CMat u = CMat::Identity(32, 32);
    for (int i = 0; i < 32; ++i) {
        const bool anc = (i >> 4) & 1;
        for (int b = 0; b < 4; ++b) {
            if (anc && ((i >> (3 - b)) & 1)) {
                u(i, i) *= -1.0;
            }
        }
    }
    return u;
}

}  // namespace

TEST(Pauli, LabelIndexRoundTrip) {
    for (int k = 0; k < kPauliCount; ++k) {
        const auto p = PauliString::from_index(k);
        EXPECT_EQ(p.index(), k);
        EXPECT_EQ(PauliString::from_label(p.label()), p);
    }
    EXPECT_EQ(PauliString::from_label("IIIIX").index(), 1);
    EXPECT_EQ(PauliString::from_label("ZIIII").index(), 3 * 256);
    EXPECT_EQ(PauliString::from_label("XYZII").weight(), 3);
    EXPECT_THROW(PauliString::from_label("XYZ"), ValidationError);
    EXPECT_THROW(PauliString::from_label("XYZIQ"), ValidationError);
}

TEST(Pauli, CommutationMatchesMatrices) {
    for (int a = 0; a < kPauliCount; a += 7) {
        for (int b = 0; b < kPauliCount; b += 13) {
            const auto p = PauliString::from_index(a), q = PauliString::from_index(b);
            const CMat mp = matrix_of(p), mq = matrix_of(q);
            const bool commute = (mp * mq - mq * mp).norm() < 1e-12;
            EXPECT_EQ(p.commutes(q), commute) << p.label() << " " << q.label();
        }
    }
}

TEST(Pauli, CzConjugationMatchesMatrixOracle) {
    const CMat u = cz4();
    for (int k = 0; k < kPauliCount; ++k) {
        const auto p = PauliString::from_index(k);
        const auto out = conjugate_by_cz4(p);
        const CMat expected = u * matrix_of(p) * u;
        EXPECT_LT((static_cast<double>(out.sign) * matrix_of(out.pauli) - expected).norm(), 1e-12) << p.label();
    }
}

TEST(Pauli, HadamardOnDataSwapsXAndZ) {
    CMat h = CMat::Identity(2, 2);
    const CMat h1 = (CMat(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
    for (int q = 1; q < kPauliQubits; ++q) {
        h = kron(h, h1);
    }
    for (int k = 0; k < kPauliCount; ++k) {
        const auto p = PauliString::from_index(k);
        const CMat conj = h * matrix_of(p) * h;
        const CMat mapped = matrix_of(hadamard_data(p));
        EXPECT_TRUE((conj - mapped).norm() < 1e-12 || (conj + mapped).norm() < 1e-12) << p.label();
    }
}

TEST(Pauli, QutritEmbeddingLeavesRydbergLevelEmpty) {
    for (auto p : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) {
        const Mat3 m = pauli_qutrit(p);
        EXPECT_EQ(m.row(2).norm() + m.col(2).norm(), 0.0);
        EXPECT_TRUE((m.topLeftCorner<2, 2>().isApprox(pauli_matrix(p))));
    }
    EXPECT_EQ(pauli_from_bits(true, true), Pauli::Y);
    EXPECT_EQ(parse_stabilizer_type("X"), StabilizerType::X);
    EXPECT_THROW(parse_stabilizer_type("Q"), ValidationError);
}
