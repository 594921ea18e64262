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
#include <limits>
#include <string>
#include <vector>

#include "rydqec/code.hpp"
#include "rydqec/pauli.hpp"
#include "rydqec/twirl.hpp"

namespace rydqec {

inline constexpr double kLambdaFloor = 1e-14;
inline constexpr double kReferenceGamma = 5e-5;

/// lambda(gamma) ~ A gamma^n + B gamma^(n+1).
struct PowerLawFit {
    int n = 0;
    double A = 0.0;
    double B = 0.0;
    double rms = 0.0;  // relative rms residual over the used points
    std::vector<double> gamma_window;
};

/// n is the rounded log-log slope between the two smallest usable gammas; A and B follow from a
/// relative-error least-squares fit. Points below kLambdaFloor are excluded; fewer than three
/// usable points raise ValidationError.
PowerLawFit fit_order(const std::vector<double> &gammas, const std::vector<double> &lambdas);

/// Whether a real-frame Pauli string produced by a plaquette of type `plaquette` carries a data
/// pair aligned with a logical operator. detecting = X considers the Z/Y support and vertical pairs
/// (Z_L direction); detecting = Z considers the X/Y support and horizontal pairs (X_L direction).
/// Support of the same Pauli type as the plaquette is first reduced modulo its stabilizer.
bool hook_predicate(const PauliString &real_frame, StabilizerType detecting, StabilizerType plaquette);

/// Real-frame label of a CZ-frame string for a plaquette of the given type.
PauliString real_frame(const PauliString &cz_frame, StabilizerType plaquette);

struct HookRecord {
    PauliString pauli;      // real frame
    StabilizerType basis;   // plaquette type the channel was extracted for
    PowerLawFit fit;
    double amplitude_at_ref;
};

struct ScheduleCensus {
    IonizationSchedule schedule;
    std::vector<HookRecord> hooks;

    int count(StabilizerType basis) const;
    int total() const { return static_cast<int>(hooks.size()); }
};

/// `series` holds CZ-frame channels of one schedule on an increasing gamma grid; `at_ref` is the
/// same schedule at kReferenceGamma.
ScheduleCensus census(const std::vector<PauliChannel> &series, const PauliChannel &at_ref);

struct LogicalPoint {
    double gamma;
    double p_L;
    double ci_lo;
    double ci_hi;
    std::uint64_t n_shots;
};

struct NuWindow {
    double max_rel_halfwidth = 0.2;
    double gamma_max = std::numeric_limits<double>::infinity();
    int max_points = 8;
    int min_points = 3;
};

struct NuFit {
    double nu = 0.0;
    double stderr_nu = 0.0;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    int n_points = 0;
    int d = 0;
    std::string schedule;
};

/// Weighted least squares of log p_L on log gamma over the lowest-gamma points whose relative CI
/// half-width is below the window bound. Throws ValidationError when fewer than min_points qualify.
NuFit fit_nu(const std::vector<LogicalPoint> &points, int d, const std::string &schedule, const NuWindow &window = {});

}  // namespace rydqec
