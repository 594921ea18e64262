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
#include <optional>
#include <string>
#include <vector>

#include "rydqec/code.hpp"
#include "rydqec/decoder.hpp"
#include "rydqec/twirl.hpp"

namespace rydqec {

/// Counter-based generator: a pure function of (seed, shot, stream).
std::uint64_t counter_random(std::uint64_t seed, std::uint64_t shot, std::uint64_t stream);

/// Vose alias table over a power-of-two support of at most 2048 outcomes. The column comes from the
/// top bits of a 64-bit draw and the acceptance coin from its low 53 bits.
class AliasTable {
  public:
    explicit AliasTable(const std::vector<double> &probs);
    int sample(std::uint64_t u) const;
    int size() const { return static_cast<int>(prob_.size()); }

  private:
    std::vector<double> prob_;
    std::vector<int> alias_;
    int shift_;
};

struct ShotBatch {
    std::uint64_t seed = 0;
    std::uint64_t first_shot = 0;
    std::uint64_t n_shots = 0;
    int n_detectors = 0;
    int words_per_shot = 0;
    std::vector<std::uint64_t> detectors;  // n_shots * words_per_shot
    std::vector<std::uint8_t> observables;

    Signature row(std::uint64_t i) const;
};

class Sampler {
  public:
    Sampler(const FaultPropagator &propagator, const PauliChannel &cz_frame_channel);

    /// Index of the Pauli drawn at `marker` in shot `shot`.
    int draw(std::uint64_t seed, std::uint64_t shot, int marker) const;
    Signature sample_shot(std::uint64_t seed, std::uint64_t shot) const;
    ShotBatch sample(std::uint64_t seed, std::uint64_t first_shot, std::uint64_t n_shots) const;
    /// Debug hook: the shot produced when only `q` fires, at `marker`.
    Signature forced_fault(int marker, const PauliString &q) const;

    const FaultPropagator &propagator() const { return *propagator_; }

  private:
    const FaultPropagator *propagator_;
    AliasTable table_;
};

struct Interval {
    double lo;
    double hi;
};

/// Wilson 95% score interval; for zero failures the upper end is the one-sided Clopper-Pearson
/// bound 1 - 0.05^(1/n).
Interval wilson_interval(std::uint64_t failures, std::uint64_t shots);

struct ShotPolicy {
    std::uint64_t max_shots = 1000000;
    std::uint64_t chunk = 20000;
    double target_rel_halfwidth = 0.2;
    std::uint64_t min_failures = 1;
};

struct LogicalEstimate {
    std::uint64_t n_shots = 0;
    std::uint64_t failures = 0;
    double p_L = 0.0;
    Interval ci{0.0, 1.0};
    std::uint64_t greedy_decodes = 0;
};

/// Adaptive Monte Carlo with a fixed chunk grid: the stopping decision is taken only at chunk
/// boundaries, so results do not depend on the number of workers.
LogicalEstimate estimate_logical(const Sampler &sampler, const Decoder &decoder, std::uint64_t seed,
                                 const ShotPolicy &policy, int workers = 1);

/// Logical failure count for an explicit batch.
LogicalEstimate estimate(const ShotBatch &batch, const Decoder &decoder);

}  // namespace rydqec
