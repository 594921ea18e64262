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
#include <filesystem>
#include <string>
#include <vector>

#include "rydqec/linalg.hpp"
#include "rydqec/pulse.hpp"

namespace rydqec {

inline constexpr int kPlaquetteAtoms = 5;
inline constexpr int kPlaquetteDim = 243;

struct NoiseParams {
    double gamma = 0.0;  // decay rate, units of omega_max
    double dt = 1e-3;    // Trotter step, units of 1/omega_max

    void validate() const;
};

enum class ScheduleKind {
    AfterEveryGateBoth,
    AncillaOnlyEveryGate,
    DataOnlyEveryGate,
    AncillaTwice,
    AncillaHalfway,
    None,
};

struct IonizationSchedule {
    ScheduleKind kind = ScheduleKind::None;
    double p_depl = 1.0;

    void validate() const;
    /// "AfterEveryGateBoth@0.75", "AncillaTwice", ...
    std::string label() const;
    static IonizationSchedule parse(const std::string &label);
    /// Atoms ionized after gate k (0-based) between the ancilla and data atom `data_atom`.
    std::vector<int> ionized_after_gate(int k, int data_atom) const;
    bool operator==(const IonizationSchedule &) const = default;
};

/// All six schedule kinds at p_depl = 1.
std::vector<IonizationSchedule> selected_location_schedules();

/// A map acting on the listed qutrits (each of dimension 3). `superop` is 9x9 for one atom and
/// 81x81 for two atoms; for two atoms the local basis index is 3 * level(active[0]) + level(active[1]).
struct QutritChannel {
    std::vector<int> active;
    CMat superop;

    int local_dim() const;
};

QutritChannel gate_channel(const PulseProfile &profile, const NoiseParams &noise, int atom_a = 0, int atom_b = 1);
QutritChannel idle_decay_channel(double duration, double gamma, int atom = 0);
QutritChannel ionization_channel(double p_depl, int atom = 0);
QutritChannel terminal_projection(int atom = 0);
/// exp(i angle |1><1|) on one qutrit.
QutritChannel rz_channel(double angle, int atom = 0);

struct PlaquetteChannel {
    std::vector<QutritChannel> stages;
    IonizationSchedule schedule;
    NoiseParams noise;
    std::string pulse_id;
    double theta = 0.0;

    /// Applies the composite to a 243x243 operator using tensor-structured stage application.
    CMat apply(const CMat &rho) const;
};

/// Stage list for one readout. `data_order[k]` is the data atom paired with the ancilla in gate k.
PlaquetteChannel compose_plaquette(const PulseProfile &profile, const NoiseParams &noise,
                                   const IonizationSchedule &schedule,
                                   std::array<int, 4> data_order = {1, 2, 3, 4});
/// Same, reusing a gate channel built for (profile, noise) on atoms (0, 1).
PlaquetteChannel compose_plaquette(const QutritChannel &gate01, const PulseProfile &profile,
                                   const NoiseParams &noise, const IonizationSchedule &schedule,
                                   std::array<int, 4> data_order = {1, 2, 3, 4});

/// Applies one stage to an n-qutrit operator (atom 0 is the most significant digit).
CMat apply_stage(const QutritChannel &stage, const CMat &rho, int n_atoms = kPlaquetteAtoms);
/// Reference path: embeds the stage's Kraus operators into the full space.
CMat apply_stage_dense(const QutritChannel &stage, const CMat &rho, int n_atoms = kPlaquetteAtoms);

/// Evaluates tr[O Phi(I)] for product operators I = (x)_j in_j and O = (x)_j out_j without forming
/// 243-dimensional operators. Requires every two-atom stage to involve atom 0 and each other atom
/// to take part in at most one such stage.
class ProductContraction {
  public:
    explicit ProductContraction(const PlaquetteChannel &channel);
    cplx evaluate(const std::array<Mat3, kPlaquetteAtoms> &in, const std::array<Mat3, kPlaquetteAtoms> &out) const;

  private:
    struct Step {
        int gate_atom;  // -1 for an ancilla-only stage
        const CMat *superop;
    };
    std::vector<Step> ancilla_steps_;
    std::array<CMat, kPlaquetteAtoms> pre_;   // accumulated single-atom stages before the gate
    std::array<CMat, kPlaquetteAtoms> post_;  // accumulated single-atom stages after the gate
    std::array<bool, kPlaquetteAtoms> gated_{};
};

void save_channel(const PlaquetteChannel &channel, const std::filesystem::path &path);
PlaquetteChannel load_channel(const std::filesystem::path &path);

}  // namespace rydqec
