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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rydqec/linalg.hpp"

namespace rydqec {

enum class Blockade { None, Infinite };

/// Plaquette gate model. Atom 0 is the ancilla, atoms 1..4 are data atoms; only ancilla-data pairs
/// are blockaded. All rates and times are expressed in units of omega_max.
struct GateModel {
    double omega_max = 1.0;
    double delta_e = 0.0;

    Blockade blockade(int atom_i, int atom_j) const;
    void validate() const;
};

struct PulseSegment {
    double duration;  // in units of 1/omega_max
    double phase;     // radians
};

/// Piecewise-constant-phase pulse at constant amplitude omega_max. Implements CZ followed by
/// R_Z(theta) = exp(i theta |1><1|) on each atom.
struct PulseProfile {
    std::vector<PulseSegment> segments;
    double theta = 0.0;
    double residual = 0.0;

    double total_time() const;
    double absolute_total_time(const GateModel &model) const {
        return total_time() / model.omega_max;
    }
    void validate() const;
    /// Content hash of the canonical CSV serialization.
    std::string id() const;
};

/// Evolution restricted to the two driven sectors: u1 on span{|01>, |0r>} and u2 on
/// span{|11>, |W+>}; full9 is the two-qutrit unitary in the basis 3*a + b with |r> = 2.
struct RestrictedUnitary {
    Mat2 u1 = Mat2::Identity();
    Mat2 u2 = Mat2::Identity();
    Mat9 full9 = Mat9::Identity();
};

struct CzAlgebraCheck {
    double theta;
    double residual;
};

Mat2 segment_unitary(double duration, double phase, double coupling);
Mat9 assemble_full9(const Mat2 &u1, const Mat2 &u2);
/// Two-qutrit coherent step for a constant-phase interval (ideal blockade, |rr> frozen).
Mat9 pair_step_unitary(double duration, double phase);

RestrictedUnitary propagate_restricted(const PulseProfile &profile);
CzAlgebraCheck verify_cz_algebra(const RestrictedUnitary &u);

/// Analytic CZ (x) R_Z(theta) (x) R_Z(theta) in restricted form, used as a reference.
RestrictedUnitary ideal_cz_unitary(double theta);

struct SynthesisOptions {
    int n_segments = 64;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    int random_starts = 16;
    double t_min = 5.0;
    double t_max = 10.0;
    double t_resolution = 1e-3;
    int max_iterations = 400;
};

/// Time-optimal search: bisection over total time, each candidate solved by Levenberg-Marquardt
/// over the segment phases with multi-start. Throws IntegrityError when t_max is not feasible.
PulseProfile synthesize_pulse(const GateModel &model, const SynthesisOptions &options);

std::string pulse_csv(const PulseProfile &profile);
void write_pulse(const PulseProfile &profile, const std::filesystem::path &csv_path);
PulseProfile read_pulse(const std::filesystem::path &csv_path);
std::filesystem::path pulse_sidecar_path(const std::filesystem::path &csv_path);

}  // namespace rydqec
