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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "rydqec/linalg.hpp"

namespace rydqec {

inline constexpr int kPauliQubits = 5;
inline constexpr int kPauliCount = 1024;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

enum class StabilizerType : std::uint8_t { X, Z };

char stabilizer_char(StabilizerType t);
StabilizerType parse_stabilizer_type(std::string_view s);

/// Five-qubit Pauli word, position 0 = ancilla, 1..4 = data atoms in readout order. The integer
/// index is the base-4 number with digits I=0, X=1, Y=2, Z=3 and position 0 most significant, so
/// index order coincides with lexicographic label order.
class PauliString {
  public:
    PauliString() { ops_.fill(Pauli::I); }
    explicit PauliString(std::array<Pauli, kPauliQubits> ops) : ops_(ops) {}

    static PauliString from_label(std::string_view label);
    static PauliString from_index(int index);

    std::string label() const;
    int index() const;
    Pauli operator[](int q) const { return ops_[q]; }
    Pauli &operator[](int q) { return ops_[q]; }
    bool x_bit(int q) const { return ops_[q] == Pauli::X || ops_[q] == Pauli::Y; }
    bool z_bit(int q) const { return ops_[q] == Pauli::Z || ops_[q] == Pauli::Y; }
    bool is_identity() const;
    int weight() const;
    bool commutes(const PauliString &other) const;

    bool operator==(const PauliString &) const = default;

  private:
    std::array<Pauli, kPauliQubits> ops_;
};

Pauli pauli_from_bits(bool x, bool z);
Mat2 pauli_matrix(Pauli p);
/// Single-qubit Pauli embedded in the qutrit space (zero on |r>).
Mat3 pauli_qutrit(Pauli p);

struct SignedPauli {
    PauliString pauli;
    int sign;
};

/// U P U with U the product of CZ(ancilla, data_k) over the four data qubits (U is self-inverse).
SignedPauli conjugate_by_cz4(const PauliString &p);

/// Exchanges X and Z on the data positions (conjugation by Hadamards on the data qubits).
PauliString hadamard_data(const PauliString &p);

}  // namespace rydqec
