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

#include "rydqec/pauli.hpp"

#include "rydqec/errors.hpp"

namespace rydqec {

char stabilizer_char(StabilizerType t) {
    return t == StabilizerType::X ? 'X' : 'Z';
}

StabilizerType parse_stabilizer_type(std::string_view s) {
    if (s == "X" || s == "x") {
        return StabilizerType::X;
    }
    if (s == "Z" || s == "z") {
        return StabilizerType::Z;
    }
    throw ValidationError("unknown basis '" + std::string(s) + "' (expected X or Z)");
}

PauliString PauliString::from_label(std::string_view label) {
    require(label.size() == kPauliQubits, "PauliString: label must have 5 symbols");
    PauliString p;
    for (int q = 0; q < kPauliQubits; ++q) {
        switch (label[q]) {
            case 'I':
                p.ops_[q] = Pauli::I;
                break;
            case 'X':
                p.ops_[q] = Pauli::X;
                break;
            case 'Y':
                p.ops_[q] = Pauli::Y;
                break;
            case 'Z':
                p.ops_[q] = Pauli::Z;
                break;
            default:
                throw ValidationError("PauliString: bad symbol in '" + std::string(label) + "'");
        }
    }
    return p;
}

PauliString PauliString::from_index(int index) {
    require(index >= 0 && index < kPauliCount, "PauliString: index out of range");
    PauliString p;
    for (int q = kPauliQubits - 1; q >= 0; --q) {
        p.ops_[q] = static_cast<Pauli>(index & 3);
        index >>= 2;
    }
    return p;
}

std::string PauliString::label() const {
    static constexpr char kSym[] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    for (auto op : ops_) {
        s += kSym[static_cast<int>(op)];
    }
    return s;
}

int PauliString::index() const {
    int k = 0;
    for (auto op : ops_) {
        k = k * 4 + static_cast<int>(op);
    }
    return k;
}

bool PauliString::is_identity() const {
    return weight() == 0;
}

int PauliString::weight() const {
    int w = 0;
    for (auto op : ops_) {
        w += op != Pauli::I;
    }
    return w;
}

bool PauliString::commutes(const PauliString &other) const {
    int anti = 0;
    for (int q = 0; q < kPauliQubits; ++q) {
        anti ^= (x_bit(q) & other.z_bit(q)) ^ (z_bit(q) & other.x_bit(q));
    }
    return anti == 0;
}

Pauli pauli_from_bits(bool x, bool z) {
    if (x) {
        return z ? Pauli::Y : Pauli::X;
    }
    return z ? Pauli::Z : Pauli::I;
}

Mat2 pauli_matrix(Pauli p) {
    Mat2 m;
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -kI, kI, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

Mat3 pauli_qutrit(Pauli p) {
    Mat3 m = Mat3::Zero();
    m.topLeftCorner<2, 2>() = pauli_matrix(p);
    return m;
}

SignedPauli conjugate_by_cz4(const PauliString &p) {
    // Track P = i^k X^x Z^z (per-qubit X before Z); Y = i X Z.
    std::array<bool, kPauliQubits> x{}, z{};
    int k = 0;
    for (int q = 0; q < kPauliQubits; ++q) {
        x[q] = p.x_bit(q);
        z[q] = p.z_bit(q);
        k += x[q] && z[q];
    }
    for (int b = 1; b < kPauliQubits; ++b) {
        if (x[0] && x[b]) {
            k += 2;
        }
        z[0] = z[0] ^ x[b];
        z[b] = z[b] ^ x[0];
    }
    PauliString out;
    for (int q = 0; q < kPauliQubits; ++q) {
        out[q] = pauli_from_bits(x[q], z[q]);
        k -= x[q] && z[q];
    }
    k = ((k % 4) + 4) % 4;
    if (k != 0 && k != 2) {
        throw IntegrityError("conjugate_by_cz4: non-Hermitian image of " + p.label());
    }
    return {out, k == 0 ? 1 : -1};
}

PauliString hadamard_data(const PauliString &p) {
    PauliString out = p;
    for (int q = 1; q < kPauliQubits; ++q) {
        if (p[q] == Pauli::X) {
            out[q] = Pauli::Z;
        } else if (p[q] == Pauli::Z) {
            out[q] = Pauli::X;
        }
    }
    return out;
}

}  // namespace rydqec
