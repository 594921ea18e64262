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
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rydqec/code.hpp"

namespace rydqec {

struct MatchingEdge {
    int u;
    int v;  // == boundary node for single-detector faults
    double p;
    double weight;
    bool logical;
};

struct GraphOptions {
    bool uniform_weights = false;
    double max_failure_fraction = 0.01;
};

/// Per-basis matching graph. Node ids are positions in `detector_ids`; the boundary node is
/// n_nodes(). Faults with more than two detectors in the basis are decomposed exactly into
/// existing edges (minimum total weight with matching logical parity).
class MatchingGraph {
  public:
    static MatchingGraph build(const DetectorErrorModel &dem, const CircuitIR &circuit, StabilizerType basis,
                               const GraphOptions &options = {});

    int n_nodes() const { return static_cast<int>(detector_ids_.size()); }
    int boundary() const { return n_nodes(); }
    StabilizerType basis() const { return basis_; }
    const std::vector<int> &detector_ids() const { return detector_ids_; }
    /// Local node of a global detector id, or -1 when it belongs to the other basis.
    int node_of(int detector) const { return node_of_detector_[detector]; }
    const std::vector<MatchingEdge> &edges() const { return edges_; }
    double distance(int a, int b) const { return dist_[a * (n_nodes() + 1) + b]; }
    bool path_parity(int a, int b) const { return parity_[a * (n_nodes() + 1) + b] != 0; }
    double decomposition_failure_mass() const { return failure_mass_; }
    double total_mass() const { return total_mass_; }
    int decomposed_faults() const { return decomposed_; }

    std::string edges_csv() const;

  private:
    void compute_shortest_paths();

    StabilizerType basis_ = StabilizerType::Z;
    std::vector<int> detector_ids_;
    std::vector<int> node_of_detector_;
    std::vector<MatchingEdge> edges_;
    std::vector<double> dist_;
    std::vector<std::uint8_t> parity_;
    double failure_mass_ = 0.0;
    double total_mass_ = 0.0;
    int decomposed_ = 0;
};

struct Correction {
    std::vector<std::pair<int, int>> pairs;  // local node ids; partner == boundary for boundary matches
    double weight = 0.0;
    bool logical = false;
    bool greedy = false;
};

class Decoder {
  public:
    explicit Decoder(const MatchingGraph &graph, int exact_cap = 16);

    /// Minimum-weight matching of the defects (local node ids) with optional boundary matches.
    Correction decode(const std::vector<int> &defects) const;
    Correction decode_exact(const std::vector<int> &defects) const;
    Correction decode_greedy(const std::vector<int> &defects) const;
    /// Predicted observable flip for a full detector signature.
    bool predict(const Signature &syndrome) const;
    std::vector<int> defects_of(const Signature &syndrome) const;

    const MatchingGraph &graph() const { return *graph_; }
    int exact_cap() const { return cap_; }

  private:
    double cost(int a, int b) const;
    Correction finish(std::vector<std::pair<int, int>> pairs, bool greedy) const;

    const MatchingGraph *graph_;
    int cap_;
};

}  // namespace rydqec
