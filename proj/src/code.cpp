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

#include "rydqec/code.hpp"

#include <bit>
#include <map>
#include <sstream>

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace {

constexpr std::array<int, 2> kNW{-1, -1};
constexpr std::array<int, 2> kNE{0, -1};
constexpr std::array<int, 2> kSW{-1, 0};
constexpr std::array<int, 2> kSE{0, 0};

const char *op_name(OpCode op) {
    switch (op) {
        case OpCode::PrepZ:
            return "prep_z";
        case OpCode::PrepX:
            return "prep_x";
        case OpCode::H:
            return "h";
        case OpCode::CZ:
            return "cz";
        case OpCode::Noise:
            return "noise";
        case OpCode::MX:
            return "mx";
        case OpCode::MZ:
            return "mz";
    }
    return "?";
}

}  // namespace

std::array<std::array<int, 2>, 4> readout_slots(StabilizerType type) {
    if (type == StabilizerType::Z) {
        return {kNW, kNE, kSW, kSE};
    }
    return {kNW, kSW, kNE, kSE};
}

int Plaquette::weight() const {
    int w = 0;
    for (int q : data) {
        w += q >= 0;
    }
    return w;
}

Layout build_layout(int d) {
    require(d >= 3 && d <= 11 && d % 2 == 1, "build_layout: d must be odd with 3 <= d <= 11");
    Layout lay;
    lay.d = d;
    for (int fy = 0; fy <= d; ++fy) {
        for (int fx = 0; fx <= d; ++fx) {
            const auto type = (fx + fy) % 2 == 0 ? StabilizerType::X : StabilizerType::Z;
            const bool vertical_edge = fx == 0 || fx == d;
            const bool horizontal_edge = fy == 0 || fy == d;
            if (vertical_edge && horizontal_edge) {
                continue;
            }
            if (vertical_edge && type != StabilizerType::X) {
                continue;
            }
            if (horizontal_edge && type != StabilizerType::Z) {
                continue;
            }
            Plaquette p{type, fx, fy, {-1, -1, -1, -1}};
            const auto slots = readout_slots(type);
            for (int k = 0; k < 4; ++k) {
                const int col = fx + slots[k][0];
                const int row = fy + slots[k][1];
                if (col >= 0 && col < d && row >= 0 && row < d) {
                    p.data[k] = row * d + col;
                }
            }
            lay.plaquettes.push_back(p);
        }
    }
    for (int i = 0; i < d; ++i) {
        lay.z_logical.push_back(i * d);  // column 0
        lay.x_logical.push_back(i);      // row 0
    }
    return lay;
}

std::string CircuitIR::serialize() const {
    std::ostringstream out;
    out << "# rydqec circuit v1\n";
    out << "qubits " << n_data << ' ' << n_ancilla << '\n';
    out << "rounds " << rounds << '\n';
    out << "memory " << stabilizer_char(memory_basis) << '\n';
    int last_round = -2;
    for (const auto &ins : instructions) {
        if (ins.round != last_round) {
            out << "round " << ins.round << '\n';
            last_round = ins.round;
        }
        out << op_name(ins.op);
        if (ins.op == OpCode::Noise) {
            out << ' ' << ins.plaquette;
        }
        for (int t : ins.targets) {
            out << ' ';
            if (t < 0) {
                out << '-';
            } else {
                out << t;
            }
        }
        out << '\n';
    }
    for (const auto &det : detectors) {
        out << "detector " << stabilizer_char(det.basis) << ' ' << det.plaquette << ' ' << det.round;
        for (int m : det.measurements) {
            out << ' ' << m;
        }
        out << '\n';
    }
    out << "observable";
    for (int m : observable) {
        out << ' ' << m;
    }
    out << '\n';
    return out.str();
}

CircuitIR build_circuit(const Layout &layout, const CircuitOptions &options) {
    const int d = layout.d;
    const int rounds = options.rounds < 0 ? d : options.rounds;
    require(rounds >= 1, "build_circuit: rounds must be >= 1");
    CircuitIR c;
    c.n_data = layout.n_data();
    c.n_ancilla = static_cast<int>(layout.plaquettes.size());
    c.rounds = rounds;
    c.memory_basis = options.memory_basis;
    const bool memory_z = options.memory_basis == StabilizerType::Z;

    std::vector<int> all_data(c.n_data);
    for (int q = 0; q < c.n_data; ++q) {
        all_data[q] = q;
    }
    c.instructions.push_back({memory_z ? OpCode::PrepZ : OpCode::PrepX, all_data, -1, -1});

    std::vector<int> order;
    if (options.scheduling == BasisScheduling::Sequential) {
        for (auto type : {StabilizerType::Z, StabilizerType::X}) {
            for (int p = 0; p < c.n_ancilla; ++p) {
                if (layout.plaquettes[p].type == type) {
                    order.push_back(p);
                }
            }
        }
    } else {
        for (int p = 0; p < c.n_ancilla; ++p) {
            order.push_back(p);
        }
    }

    std::vector<int> last(c.n_ancilla, -1);
    for (int r = 0; r < rounds; ++r) {
        for (int p : order) {
            const auto &plaq = layout.plaquettes[p];
            const int anc = c.n_data + p;
            std::vector<int> present;
            for (int q : plaq.data) {
                if (q >= 0) {
                    present.push_back(q);
                }
            }
            const bool sandwich = plaq.type == StabilizerType::X;
            c.instructions.push_back({OpCode::PrepX, {anc}, -1, r});
            if (sandwich) {
                c.instructions.push_back({OpCode::H, present, -1, r});
            }
            for (int q : present) {
                c.instructions.push_back({OpCode::CZ, {anc, q}, -1, r});
            }
            std::vector<int> slots{anc};
            slots.insert(slots.end(), plaq.data.begin(), plaq.data.end());
            c.noise_markers.push_back(static_cast<int>(c.instructions.size()));
            c.instructions.push_back({OpCode::Noise, slots, p, r});
            if (sandwich) {
                c.instructions.push_back({OpCode::H, present, -1, r});
            }
            c.instructions.push_back({OpCode::MX, {anc}, -1, r});
            const int m = c.n_measurements++;
            if (plaq.type == options.memory_basis) {
                if (r == 0) {
                    c.detectors.push_back({{m}, plaq.type, p, r});
                } else {
                    c.detectors.push_back({{last[p], m}, plaq.type, p, r});
                }
            } else if (r > 0) {
                c.detectors.push_back({{last[p], m}, plaq.type, p, r});
            }
            last[p] = m;
        }
    }

    const int first_final = c.n_measurements;
    c.instructions.push_back({memory_z ? OpCode::MZ : OpCode::MX, all_data, -1, rounds});
    c.n_measurements += c.n_data;
    for (int p = 0; p < c.n_ancilla; ++p) {
        const auto &plaq = layout.plaquettes[p];
        if (plaq.type != options.memory_basis) {
            continue;
        }
        Detector det{{last[p]}, plaq.type, p, rounds};
        for (int q : plaq.data) {
            if (q >= 0) {
                det.measurements.push_back(first_final + q);
            }
        }
        c.detectors.push_back(det);
    }
    for (int q : memory_z ? layout.z_logical : layout.x_logical) {
        c.observable.push_back(first_final + q);
    }
    return c;
}

Signature &Signature::operator^=(const Signature &o) {
    for (size_t i = 0; i < words.size(); ++i) {
        words[i] ^= o.words[i];
    }
    logical ^= o.logical;
    return *this;
}

bool Signature::empty() const {
    if (logical) {
        return false;
    }
    for (auto w : words) {
        if (w != 0) {
            return false;
        }
    }
    return true;
}

std::vector<int> Signature::detectors() const {
    std::vector<int> out;
    for (size_t i = 0; i < words.size(); ++i) {
        auto w = words[i];
        while (w != 0) {
            out.push_back(static_cast<int>(i * 64) + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

FaultPropagator::FaultPropagator(const CircuitIR &circuit)
    : circuit_(&circuit), n_detectors_(static_cast<int>(circuit.detectors.size())) {
    detectors_of_measurement_.resize(circuit.n_measurements);
    in_observable_.assign(circuit.n_measurements, 0);
    for (int k = 0; k < n_detectors_; ++k) {
        for (int m : circuit.detectors[k].measurements) {
            detectors_of_measurement_[m].push_back(k);
        }
    }
    for (int m : circuit.observable) {
        in_observable_[m] ^= 1;
    }
    const int n_qubits = circuit.n_data + circuit.n_ancilla;
    for (int marker : circuit.noise_markers) {
        const auto &ins = circuit.instructions[marker];
        std::array<Signature, 10> gens;
        for (int slot = 0; slot < kPauliQubits; ++slot) {
            for (int kind = 0; kind < 2; ++kind) {
                gens[2 * slot + kind] = Signature(n_detectors_);
                const int q = ins.targets[slot];
                if (q < 0) {
                    continue;  // absent boundary slot: its component is marginalized
                }
                std::vector<std::uint8_t> x(n_qubits, 0), z(n_qubits, 0);
                (kind == 0 ? x : z)[q] = 1;
                gens[2 * slot + kind] = propagate(marker, x, z);
            }
        }
        generators_.push_back(std::move(gens));
    }
}

Signature FaultPropagator::propagate(int start, const std::vector<std::uint8_t> &x0,
                                     const std::vector<std::uint8_t> &z0) const {
    std::vector<std::uint8_t> x = x0;
    std::vector<std::uint8_t> z = z0;
    Signature sig(n_detectors_);
    int m = 0;
    const auto &ins_list = circuit_->instructions;
    for (int i = 0; i < static_cast<int>(ins_list.size()); ++i) {
        const auto &ins = ins_list[i];
        const bool active = i > start;
        switch (ins.op) {
            case OpCode::PrepZ:
            case OpCode::PrepX:
                if (active) {
                    for (int q : ins.targets) {
                        x[q] = z[q] = 0;
                    }
                }
                break;
            case OpCode::H:
                if (active) {
                    for (int q : ins.targets) {
                        std::swap(x[q], z[q]);
                    }
                }
                break;
            case OpCode::CZ:
                if (active) {
                    const int a = ins.targets[0];
                    const int b = ins.targets[1];
                    z[a] ^= x[b];
                    z[b] ^= x[a];
                }
                break;
            case OpCode::Noise:
                break;
            case OpCode::MX:
            case OpCode::MZ:
                for (int q : ins.targets) {
                    const bool flip = ins.op == OpCode::MX ? z[q] : x[q];
                    if (active && flip) {
                        for (int k : detectors_of_measurement_[m]) {
                            sig.flip(k);
                        }
                        sig.logical ^= in_observable_[m] != 0;
                    }
                    ++m;
                }
                break;
        }
    }
    return sig;
}

Signature FaultPropagator::signature(int marker, const PauliString &q) const {
    Signature sig(n_detectors_);
    const auto &gens = generators_.at(marker);
    for (int slot = 0; slot < kPauliQubits; ++slot) {
        if (q.x_bit(slot)) {
            sig ^= gens[2 * slot];
        }
        if (q.z_bit(slot)) {
            sig ^= gens[2 * slot + 1];
        }
    }
    return sig;
}

double merge_probability(double p, double q) {
    return p * (1 - q) + q * (1 - p);
}

std::string DetectorErrorModel::to_csv() const {
    std::ostringstream out;
    out << "probability,detectors,logical,provenance\n";
    for (const auto &f : faults) {
        out << format_double(f.probability) << ',';
        for (size_t i = 0; i < f.detectors.size(); ++i) {
            out << (i ? ";" : "") << f.detectors[i];
        }
        out << ',' << (f.logical ? 1 : 0) << ',' << f.provenance << '\n';
    }
    return out.str();
}

DetectorErrorModel enumerate_faults(const CircuitIR &circuit, const FaultPropagator &propagator,
                                    const PauliChannel &cz_frame_channel, double p_floor) {
    require(p_floor >= 0, "enumerate_faults: p_floor must be >= 0");
    require(cz_frame_channel.basis == StabilizerType::Z, "enumerate_faults: channel must be in the CZ frame");
    DetectorErrorModel dem;
    dem.n_detectors = propagator.n_detectors();
    struct Entry {
        double p;
        std::string provenance;
        int merged;
    };
    std::map<Signature, size_t> index;
    std::vector<std::pair<Signature, Entry>> entries;
    for (int m = 0; m < propagator.n_markers(); ++m) {
        const auto &ins = circuit.instructions[circuit.noise_markers[m]];
        for (int k = 1; k < kPauliCount; ++k) {
            const double p = cz_frame_channel.probs[k];
            if (p <= 0 || p < p_floor) {
                continue;
            }
            const auto q = PauliString::from_index(k);
            Signature sig = propagator.signature(m, q);
            if (sig.empty()) {
                continue;
            }
            auto [it, inserted] = index.emplace(sig, entries.size());
            if (inserted) {
                std::string prov = "r" + std::to_string(ins.round) + ":p" + std::to_string(ins.plaquette) + ":" + q.label();
                entries.push_back({std::move(sig), {p, std::move(prov), 1}});
            } else {
                auto &e = entries[it->second].second;
                e.p = merge_probability(e.p, p);
                ++e.merged;
            }
        }
    }
    for (auto &[sig, e] : entries) {
        std::string prov = e.provenance;
        if (e.merged > 1) {
            prov += "+" + std::to_string(e.merged - 1);
        }
        dem.faults.push_back({e.p, sig.detectors(), sig.logical, prov});
    }
    return dem;
}

}  // namespace rydqec
