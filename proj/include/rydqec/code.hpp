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
#include <vector>

#include "rydqec/pauli.hpp"
#include "rydqec/twirl.hpp"

namespace rydqec {

/// Offsets (column, row) of the four readout slots of a plaquette relative to its face (fx, fy):
/// Z-type plaquettes read NW, NE, SW, SE; X-type plaquettes read NW, SW, NE, SE. The last two slots
/// of each type lie perpendicular to the logical operator of the same Pauli type.
std::array<std::array<int, 2>, 4> readout_slots(StabilizerType type);

struct Plaquette {
    StabilizerType type;
    int face_x;
    int face_y;
    /// Data qubit per readout slot, -1 where the face lies on the boundary.
    std::array<int, 4> data;

    int weight() const;
};

/// Rotated surface code on a d x d data grid. Data qubit (col, row) has index row * d + col and
/// doubled coordinates (2 col + 1, 2 row + 1); the ancilla of face (fx, fy) sits at (2 fx, 2 fy).
/// Left/right boundaries carry X-type faces, top/bottom Z-type faces. Z_L is data column 0
/// (vertical), X_L is data row 0 (horizontal).
struct Layout {
    int d;
    std::vector<Plaquette> plaquettes;
    std::vector<int> z_logical;
    std::vector<int> x_logical;

    int n_data() const { return d * d; }
    int data_col(int q) const { return q % d; }
    int data_row(int q) const { return q / d; }
};

Layout build_layout(int d);

enum class OpCode : std::uint8_t { PrepZ, PrepX, H, CZ, Noise, MX, MZ };

struct Instruction {
    OpCode op;
    std::vector<int> targets;  // for Noise: slot qubits (ancilla first, -1 if absent)
    int plaquette = -1;        // for Noise
    int round = -1;
};

struct Detector {
    std::vector<int> measurements;
    StabilizerType basis;  // type of the plaquette it belongs to
    int plaquette;
    int round;  // rounds counted from 0; the final closure uses round = d
};

enum class BasisScheduling : std::uint8_t { Sequential, Interleaved };

struct CircuitOptions {
    StabilizerType memory_basis = StabilizerType::Z;
    BasisScheduling scheduling = BasisScheduling::Sequential;
    int rounds = -1;  // defaults to d
};

struct CircuitIR {
    int n_data = 0;
    int n_ancilla = 0;
    int rounds = 0;
    StabilizerType memory_basis = StabilizerType::Z;
    std::vector<Instruction> instructions;
    int n_measurements = 0;
    std::vector<Detector> detectors;
    std::vector<int> observable;  // measurement indices
    std::vector<int> noise_markers;  // instruction indices of Noise ops, in circuit order

    std::string serialize() const;
};

CircuitIR build_circuit(const Layout &layout, const CircuitOptions &options = {});

/// Detector bit set plus the observable flip.
struct Signature {
    std::vector<std::uint64_t> words;
    bool logical = false;

    explicit Signature(int n_detectors = 0) : words((n_detectors + 63) / 64, 0) {}
    void flip(int detector) { words[detector >> 6] ^= std::uint64_t{1} << (detector & 63); }
    bool test(int detector) const { return (words[detector >> 6] >> (detector & 63)) & 1; }
    Signature &operator^=(const Signature &o);
    bool empty() const;
    std::vector<int> detectors() const;
    bool operator==(const Signature &) const = default;
    auto operator<=>(const Signature &) const = default;
};

/// Pauli-frame propagation of single-slot faults injected at every noise marker.
class FaultPropagator {
  public:
    explicit FaultPropagator(const CircuitIR &circuit);

    int n_markers() const { return static_cast<int>(generators_.size()); }
    int n_detectors() const { return n_detectors_; }
    /// Signature of Q applied (in the CZ frame) right after the CZ block of the given marker.
    Signature signature(int marker, const PauliString &q) const;
    /// Propagates an arbitrary frame (x, z bits per qubit) injected after instruction `start`.
    Signature propagate(int start, const std::vector<std::uint8_t> &x, const std::vector<std::uint8_t> &z) const;

  private:
    const CircuitIR *circuit_;
    int n_detectors_;
    std::vector<std::vector<int>> detectors_of_measurement_;
    std::vector<std::uint8_t> in_observable_;
    // generators_[m][2 * slot + (0 for X, 1 for Z)]
    std::vector<std::array<Signature, 10>> generators_;
};

struct Fault {
    double probability;
    std::vector<int> detectors;
    bool logical;
    std::string provenance;
};

struct DetectorErrorModel {
    int n_detectors = 0;
    std::vector<Fault> faults;

    std::string to_csv() const;
};

double merge_probability(double p, double q);

/// Applies the CZ-frame channel at every marker; faults with identical signatures are merged.
DetectorErrorModel enumerate_faults(const CircuitIR &circuit, const FaultPropagator &propagator,
                                    const PauliChannel &cz_frame_channel, double p_floor = 1e-12);

}  // namespace rydqec
