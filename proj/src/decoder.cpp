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

#include "rydqec/decoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double edge_weight(double p, bool uniform) {
    return uniform ? 1.0 : std::log((1 - p) / p);
}

struct Decomposition {
    double weight = kInf;
    std::vector<int> edges;
};

// Exact search over partitions of `nodes` into blocks of one (boundary edge) or two (bulk edge)
// nodes that are all present in the edge map, with XOR of logical bits equal to `logical`.
void decompose(const std::vector<int> &nodes, size_t pos, std::vector<bool> &used, bool parity, bool logical,
               double weight, std::vector<int> &chosen, int boundary,
               const std::map<std::tuple<int, int, bool>, int> &edge_index, const std::vector<MatchingEdge> &edges,
               Decomposition &best) {
    while (pos < nodes.size() && used[pos]) {
        ++pos;
    }
    if (pos == nodes.size()) {
        if (parity == logical && weight < best.weight) {
            best.weight = weight;
            best.edges = chosen;
        }
        return;
    }
    if (weight >= best.weight) {
        return;
    }
    used[pos] = true;
    auto try_edge = [&](int a, int b) {
        for (bool lg : {false, true}) {
            auto it = edge_index.find({a, b, lg});
            if (it == edge_index.end()) {
                continue;
            }
            chosen.push_back(it->second);
            decompose(nodes, pos + 1, used, parity ^ lg, logical, weight + edges[it->second].weight, chosen,
                      boundary, edge_index, edges, best);
            chosen.pop_back();
        }
    };
    try_edge(nodes[pos], boundary);
    for (size_t j = pos + 1; j < nodes.size(); ++j) {
        if (used[j]) {
            continue;
        }
        used[j] = true;
        try_edge(nodes[pos], nodes[j]);
        used[j] = false;
    }
    used[pos] = false;
}

}  // namespace

MatchingGraph MatchingGraph::build(const DetectorErrorModel &dem, const CircuitIR &circuit, StabilizerType basis,
                                   const GraphOptions &options) {
    require(static_cast<int>(circuit.detectors.size()) == dem.n_detectors, "build_graph: DEM/circuit mismatch");
    MatchingGraph g;
    g.basis_ = basis;
    g.node_of_detector_.assign(dem.n_detectors, -1);
    for (int k = 0; k < dem.n_detectors; ++k) {
        if (circuit.detectors[k].basis == basis) {
            g.node_of_detector_[k] = static_cast<int>(g.detector_ids_.size());
            g.detector_ids_.push_back(k);
        }
    }
    const int boundary = g.n_nodes();
    const bool keep_logical = basis == circuit.memory_basis;

    std::map<std::tuple<int, int, bool>, int> edge_index;
    std::vector<std::pair<std::vector<int>, const Fault *>> hyper;
    for (const auto &f : dem.faults) {
        std::vector<int> nodes;
        for (int det : f.detectors) {
            require(det >= 0 && det < dem.n_detectors, "build_graph: fault references unknown detector");
            if (g.node_of_detector_[det] >= 0) {
                nodes.push_back(g.node_of_detector_[det]);
            }
        }
        if (nodes.empty()) {
            continue;
        }
        const bool logical = keep_logical && f.logical;
        g.total_mass_ += f.probability;
        if (nodes.size() > 2) {
            hyper.emplace_back(std::move(nodes), &f);
            continue;
        }
        const int u = nodes[0];
        const int v = nodes.size() == 2 ? nodes[1] : boundary;
        const auto key = std::make_tuple(std::min(u, v), std::max(u, v), logical);
        auto [it, inserted] = edge_index.emplace(key, static_cast<int>(g.edges_.size()));
        if (inserted) {
            g.edges_.push_back({std::get<0>(key), std::get<1>(key), f.probability, 0.0, logical});
        } else {
            auto &e = g.edges_[it->second];
            e.p = merge_probability(e.p, f.probability);
        }
    }
    for (auto &e : g.edges_) {
        if (e.p >= 0.5) {
            throw IntegrityError("build_graph: edge probability " + format_double(e.p) + " >= 0.5");
        }
        e.weight = edge_weight(e.p, options.uniform_weights);
    }
    std::vector<double> extra(g.edges_.size(), 0.0);
    for (const auto &[nodes, fault] : hyper) {
        std::vector<bool> used(nodes.size(), false);
        std::vector<int> chosen;
        Decomposition best;
        decompose(nodes, 0, used, false, keep_logical && fault->logical, 0.0, chosen, boundary, edge_index, g.edges_,
                  best);
        if (best.edges.empty()) {
            g.failure_mass_ += fault->probability;
            continue;
        }
        ++g.decomposed_;
        for (int e : best.edges) {
            extra[e] = merge_probability(extra[e], fault->probability);
        }
    }
    for (size_t i = 0; i < g.edges_.size(); ++i) {
        auto &e = g.edges_[i];
        if (extra[i] > 0) {
            e.p = merge_probability(e.p, extra[i]);
            if (e.p >= 0.5) {
                throw IntegrityError("build_graph: edge probability " + format_double(e.p) + " >= 0.5");
            }
            e.weight = edge_weight(e.p, options.uniform_weights);
        }
    }
    if (g.total_mass_ > 0 && g.failure_mass_ > options.max_failure_fraction * g.total_mass_) {
        throw IntegrityError("build_graph: undecomposable fault mass " + format_double(g.failure_mass_) + " exceeds " +
                             format_double(options.max_failure_fraction) + " of total " + format_double(g.total_mass_));
    }
    g.compute_shortest_paths();
    return g;
}

void MatchingGraph::compute_shortest_paths() {
    const int n = n_nodes() + 1;
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge)
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        adj[edges_[i].u].emplace_back(edges_[i].v, i);
        adj[edges_[i].v].emplace_back(edges_[i].u, i);
    }
    dist_.assign(static_cast<size_t>(n) * n, kInf);
    parity_.assign(static_cast<size_t>(n) * n, 0);
    for (int src = 0; src < n; ++src) {
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        double *dist = &dist_[static_cast<size_t>(src) * n];
        std::uint8_t *par = &parity_[static_cast<size_t>(src) * n];
        std::vector<bool> done(n, false);
        dist[src] = 0;
        queue.emplace(0.0, src);
        while (!queue.empty()) {
            auto [d, u] = queue.top();
            queue.pop();
            if (done[u]) {
                continue;
            }
            done[u] = true;
            // Paths do not pass through the boundary node: it stands for many distinct boundary sites.
            if (u == n - 1 && src != n - 1) {
                continue;
            }
            for (auto [v, e] : adj[u]) {
                const double nd = d + edges_[e].weight;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    par[v] = par[u] ^ static_cast<std::uint8_t>(edges_[e].logical);
                    queue.emplace(nd, v);
                }
            }
        }
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            // Enforce exact symmetry (ties may resolve differently per source).
            dist_[static_cast<size_t>(b) * n + a] = dist_[static_cast<size_t>(a) * n + b];
            parity_[static_cast<size_t>(b) * n + a] = parity_[static_cast<size_t>(a) * n + b];
        }
    }
}

std::string MatchingGraph::edges_csv() const {
    std::ostringstream out;
    out << "u,v,weight,p,logical\n";
    for (const auto &e : edges_) {
        out << e.u << ',' << (e.v == boundary() ? std::string("B") : std::to_string(e.v)) << ','
            << format_double(e.weight) << ',' << format_double(e.p) << ',' << (e.logical ? 1 : 0) << '\n';
    }
    return out.str();
}

Decoder::Decoder(const MatchingGraph &graph, int exact_cap) : graph_(&graph), cap_(exact_cap) {
    require(exact_cap >= 0 && exact_cap <= 24, "Decoder: exact cap must lie in [0, 24]");
}

double Decoder::cost(int a, int b) const {
    const int bnd = graph_->boundary();
    if (a == bnd && b == bnd) {
        return 0.0;
    }
    return graph_->distance(a, b);
}

Correction Decoder::finish(std::vector<std::pair<int, int>> pairs, bool greedy) const {
    Correction c;
    c.greedy = greedy;
    const int bnd = graph_->boundary();
    for (auto &[a, b] : pairs) {
        if (a == bnd) {
            std::swap(a, b);
        }
        if (a == bnd) {
            continue;
        }
        c.weight += cost(a, b);
        c.logical ^= graph_->path_parity(a, b);
        c.pairs.emplace_back(a, b);
    }
    std::sort(c.pairs.begin(), c.pairs.end());
    return c;
}

Correction Decoder::decode(const std::vector<int> &defects) const {
    if (static_cast<int>(defects.size()) <= cap_) {
        return decode_exact(defects);
    }
    return decode_greedy(defects);
}

Correction Decoder::decode_exact(const std::vector<int> &defects) const {
    const int k = static_cast<int>(defects.size());
    require(k <= 24, "decode_exact: too many defects");
    const int bnd = graph_->boundary();
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    std::vector<double> best(full + 1, kInf);
    std::vector<std::int8_t> partner(full + 1, -1);  // k means boundary
    best[0] = 0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int i = std::countr_zero(mask);
        const std::uint32_t rest = mask & ~(std::uint32_t{1} << i);
        double b = best[rest] + cost(defects[i], bnd);
        int choice = k;
        for (std::uint32_t m = rest; m != 0; m &= m - 1) {
            const int j = std::countr_zero(m);
            const double c = best[rest & ~(std::uint32_t{1} << j)] + cost(defects[i], defects[j]);
            if (c < b) {
                b = c;
                choice = j;
            }
        }
        best[mask] = b;
        partner[mask] = static_cast<std::int8_t>(choice);
    }
    std::vector<std::pair<int, int>> pairs;
    std::uint32_t mask = full;
    while (mask != 0) {
        const int i = std::countr_zero(mask);
        const int j = partner[mask];
        mask &= ~(std::uint32_t{1} << i);
        if (j == k) {
            pairs.emplace_back(defects[i], bnd);
        } else {
            mask &= ~(std::uint32_t{1} << j);
            pairs.emplace_back(defects[i], defects[j]);
        }
    }
    return finish(std::move(pairs), false);
}

Correction Decoder::decode_greedy(const std::vector<int> &defects) const {
    const int bnd = graph_->boundary();
    const int k = static_cast<int>(defects.size());
    std::vector<bool> matched(k, false);
    std::vector<std::pair<int, int>> pairs;
    for (int left = k; left > 0;) {
        double best = kInf;
        int bi = -1;
        int bj = -1;  // -1 means boundary
        for (int i = 0; i < k; ++i) {
            if (matched[i]) {
                continue;
            }
            const double cb = cost(defects[i], bnd);
            if (cb < best) {
                best = cb;
                bi = i;
                bj = -1;
            }
            for (int j = i + 1; j < k; ++j) {
                if (!matched[j] && cost(defects[i], defects[j]) < best) {
                    best = cost(defects[i], defects[j]);
                    bi = i;
                    bj = j;
                }
            }
        }
        matched[bi] = true;
        --left;
        if (bj >= 0) {
            matched[bj] = true;
            --left;
            pairs.emplace_back(defects[bi], defects[bj]);
        } else {
            pairs.emplace_back(defects[bi], bnd);
        }
    }
    // 2-opt: re-pair any two units when a cheaper combination of their endpoints exists.
    bool improved = true;
    while (improved) {
        improved = false;
        for (size_t s = 0; s < pairs.size() && !improved; ++s) {
            for (size_t t = s + 1; t < pairs.size() && !improved; ++t) {
                const auto [a, b] = pairs[s];
                const auto [c, d] = pairs[t];
                const double now = cost(a, b) + cost(c, d);
                const double alt1 = cost(a, c) + cost(b, d);
                const double alt2 = cost(a, d) + cost(b, c);
                if (alt1 < now - 1e-12 && alt1 <= alt2) {
                    pairs[s] = {a, c};
                    pairs[t] = {b, d};
                    improved = true;
                } else if (alt2 < now - 1e-12) {
                    pairs[s] = {a, d};
                    pairs[t] = {b, c};
                    improved = true;
                }
            }
        }
    }
    return finish(std::move(pairs), true);
}

std::vector<int> Decoder::defects_of(const Signature &syndrome) const {
    std::vector<int> defects;
    for (int det : syndrome.detectors()) {
        const int node = graph_->node_of(det);
        if (node >= 0) {
            defects.push_back(node);
        }
    }
    return defects;
}

bool Decoder::predict(const Signature &syndrome) const {
    const auto defects = defects_of(syndrome);
    if (defects.empty()) {
        return false;
    }
    return decode(defects).logical;
}

}  // namespace rydqec
