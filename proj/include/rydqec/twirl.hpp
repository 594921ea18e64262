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

#include <filesystem>
#include <functional>
#include <vector>

#include "rydqec/dynamics.hpp"
#include "rydqec/pauli.hpp"

namespace rydqec {

/// tr[P E(Q)] for a qubit-space channel E on the five plaquette qubits.
using PauliElement = std::function<cplx(const PauliString &p, const PauliString &q)>;

/// Plaquette noise with the ideal CZ layer factored out: E_err(s) = Phi(U s U) with U = CZ^(x)4, so
/// that Phi = E_err o U . U. Only product-operator matrix elements are evaluated.
class ErrorChannel {
  public:
    ErrorChannel(const PlaquetteChannel &plaquette, const PulseProfile &profile);

    cplx pauli_element(const PauliString &p, const PauliString &q) const;
    /// Dense application on a 32x32 qubit operator (reference path for tests).
    CMat apply(const CMat &sigma) const;

  private:
    const PlaquetteChannel *plaquette_;
    ProductContraction contraction_;
};

/// R_PP = Re tr[P E(P)] / 32, indexed by PauliString::index().
std::vector<double> ptm_diagonal(const PauliElement &element);
std::vector<double> ptm_diagonal(const ErrorChannel &channel);

struct PauliChannel {
    std::vector<double> probs = std::vector<double>(kPauliCount, 0.0);
    double gamma = 0.0;
    IonizationSchedule schedule;
    /// Stabilizer type whose circuit frame the labels refer to; Z is the bare CZ frame.
    StabilizerType basis = StabilizerType::Z;

    double operator[](const PauliString &q) const { return probs[q.index()]; }
    double total() const;
    void validate() const;
};

/// Exact Pauli twirl of a PTM diagonal. Negative dust down to -1e-10 is clamped and the result is
/// renormalized; larger deviations raise IntegrityError.
PauliChannel twirl(const std::vector<double> &ptm_diag);

PauliChannel extract_pauli_channel(const PlaquetteChannel &plaquette, const PulseProfile &profile);

/// Relabels a CZ-frame channel for an X-type plaquette (Hadamard sandwich on the data qubits).
PauliChannel to_x_plaquette_frame(const PauliChannel &cz_frame);

void write_pauli_channel(const PauliChannel &channel, const std::filesystem::path &path);
PauliChannel read_pauli_channel(const std::filesystem::path &path);

}  // namespace rydqec
