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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "rydqec/code.hpp"
#include "rydqec/errors.hpp"

using namespace rydqec;

namespace {

std::set<int> support(const Plaquette &p) {
    std::set<int> s;
    for (int q : p.data) {
        if (q >= 0) {
            s.insert(q);
        }
    }
    return s;
}

int overlap(const std::set<int> &a, const std::set<int> &b) {
    int n = 0;
    for (int q : a) {
        n += b.count(q);
    }
    return n;
}

// Real-amplitude state vector; every gate in the circuit and every Pauli up to phase is real.
class StateVector {
  public:
    StateVector(int n_qubits, std::uint64_t seed) : n_(n_qubits), amp_(std::size_t{1} << n_qubits, 0.0), rng_(seed) {
        amp_[0] = 1.0;
    }
    void x(int q) {
        const auto bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (!(i & bit)) {
                std::swap(amp_[i], amp_[i | bit]);
            }
        }
    }
    void z(int q) {
        const auto bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) {
                amp_[i] = -amp_[i];
            }
        }
    }
    void h(int q) {
        const auto bit = std::size_t{1} << q;
        const double s = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (!(i & bit)) {
                const double a = amp_[i];
                const double b = amp_[i | bit];
                amp_[i] = s * (a + b);
                amp_[i | bit] = s * (a - b);
            }
        }
    }
    void cz(int a, int b) {
        const auto mask = (std::size_t{1} << a) | (std::size_t{1} << b);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if ((i & mask) == mask) {
                amp_[i] = -amp_[i];
            }
        }
    }
    int measure_z(int q) {
        const auto bit = std::size_t{1} << q;
        double p1 = 0.0;
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            if (i & bit) {
                p1 += amp_[i] * amp_[i];
            }
        }
        const int outcome = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p1 ? 1 : 0;
        const double norm = 1.0 / std::sqrt(outcome ? p1 : 1.0 - p1);
        for (std::size_t i = 0; i < amp_.size(); ++i) {
            amp_[i] = (((i & bit) != 0) == (outcome == 1)) ? amp_[i] * norm : 0.0;
        }
        return outcome;
    }
    int measure_x(int q) {
        h(q);
        const int m = measure_z(q);
        h(q);
        return m;
    }
    void reset_z(int q) {
        if (measure_z(q)) {
            x(q);
        }
    }

  private:
    int n_;
    std::vector<double> amp_;
    std::mt19937_64 rng_;
};

struct Outcome {
    std::vector<int> detectors;
    bool observable;
};

// Simulates the circuit, applying `fault` on the slot qubits of noise instruction `fault_at`.
Outcome simulate(const CircuitIR &c, std::uint64_t seed, int fault_at = -1, const PauliString &fault = {}) {
    StateVector sv(c.n_data + c.n_ancilla, seed);
    std::vector<int> m;
    for (int i = 0; i < static_cast<int>(c.instructions.size()); ++i) {
        const auto &ins = c.instructions[i];
        switch (ins.op) {
            case OpCode::PrepZ:
            case OpCode::PrepX:
                for (int q : ins.targets) {
                    sv.reset_z(q);
                    if (ins.op == OpCode::PrepX) {
                        sv.h(q);
                    }
                }
                break;
            case OpCode::H:
                for (int q : ins.targets) {
                    sv.h(q);
                }
                break;
            case OpCode::CZ:
                sv.cz(ins.targets[0], ins.targets[1]);
                break;
            case OpCode::Noise:
                if (i == fault_at) {
                    for (int slot = 0; slot < kPauliQubits; ++slot) {
                        const int q = ins.targets[slot];
                        if (q < 0) {
                            continue;
                        }
                        if (fault.z_bit(slot)) {
                            sv.z(q);
                        }
                        if (fault.x_bit(slot)) {
                            sv.x(q);
                        }
                    }
                }
                break;
            case OpCode::MX:
            case OpCode::MZ:
                for (int q : ins.targets) {
                    m.push_back(ins.op == OpCode::MX ? sv.measure_x(q) : sv.measure_z(q));
                }
                break;
        }
    }
    Outcome out;
    for (int k = 0; k < static_cast<int>(c.detectors.size()); ++k) {
        int parity = 0;
        for (int idx : c.detectors[k].measurements) {
            parity ^= m[idx];
        }
        if (parity) {
            out.detectors.push_back(k);
        }
    }
    int obs = 0;
    for (int idx : c.observable) {
        obs ^= m[idx];
    }
    out.observable = obs != 0;
    return out;
}

PauliChannel single_pauli_channel(const std::string &label, double p) {
    PauliChannel ch;
    ch.probs[0] = 1.0 - p;
    ch.probs[PauliString::from_label(label).index()] = p;
    return ch;
}

}  // namespace

TEST(Code, LayoutCounts) {
    for (int d : {3, 5, 7}) {
        const Layout lay = build_layout(d);
        EXPECT_EQ(lay.n_data(), d * d);
        EXPECT_EQ(static_cast<int>(lay.plaquettes.size()), d * d - 1);
        int x = 0, z = 0, bulk = 0;
        for (const auto &p : lay.plaquettes) {
            (p.type == StabilizerType::X ? x : z)++;
            EXPECT_TRUE(p.weight() == 2 || p.weight() == 4);
            bulk += p.weight() == 4;
        }
        EXPECT_EQ(x, (d * d - 1) / 2);
        EXPECT_EQ(z, (d * d - 1) / 2);
        EXPECT_EQ(bulk, (d - 1) * (d - 1));
    }
    EXPECT_THROW(build_layout(4), ValidationError);
}

TEST(Code, StabilizersAndLogicalsCommute) {
    for (int d : {3, 5}) {
        const Layout lay = build_layout(d);
        const std::set<int> zl(lay.z_logical.begin(), lay.z_logical.end());
        const std::set<int> xl(lay.x_logical.begin(), lay.x_logical.end());
        EXPECT_EQ(overlap(zl, xl) % 2, 1);
        for (const auto &a : lay.plaquettes) {
            const auto sa = support(a);
            // A Z logical must commute with X checks and vice versa.
            if (a.type == StabilizerType::X) {
                EXPECT_EQ(overlap(sa, zl) % 2, 0);
            } else {
                EXPECT_EQ(overlap(sa, xl) % 2, 0);
            }
            for (const auto &b : lay.plaquettes) {
                if (a.type != b.type) {
                    EXPECT_EQ(overlap(sa, support(b)) % 2, 0);
                }
            }
        }
        for (int q : lay.z_logical) {
            EXPECT_EQ(lay.data_col(q), 0);
        }
        for (int q : lay.x_logical) {
            EXPECT_EQ(lay.data_row(q), 0);
        }
    }
}

TEST(Code, ReadoutSlotsFollowTheConvention) {
    const auto z = readout_slots(StabilizerType::Z);
    const auto x = readout_slots(StabilizerType::X);
    // Last two slots of a Z check share a row; last two of an X check share a column.
    EXPECT_EQ(z[2][1], z[3][1]);
    EXPECT_EQ(x[2][0], x[3][0]);
    EXPECT_EQ(z[0], x[0]);
    EXPECT_EQ(z[3], x[3]);
}

TEST(Code, CircuitShape) {
    const Layout lay = build_layout(3);
    const CircuitIR c = build_circuit(lay);
    EXPECT_EQ(c.rounds, 3);
    EXPECT_EQ(c.detectors.size(), 24u);
    EXPECT_EQ(c.noise_markers.size(), 24u);
    EXPECT_EQ(c.n_measurements, 24 + 9);
    EXPECT_EQ(c.observable.size(), 3u);
    const std::string text = c.serialize();
    EXPECT_EQ(text.rfind("# rydqec circuit v1\nqubits 9 8\nrounds 3\nmemory Z\n", 0), 0u);
    EXPECT_NE(text.find("observable 24 27 30"), std::string::npos);
    const CircuitIR c5 = build_circuit(build_layout(5));
    EXPECT_EQ(c5.detectors.size(), static_cast<size_t>(12 * 5 + 12 * 4 + 12));
    const CircuitIR cx = build_circuit(lay, {StabilizerType::X, BasisScheduling::Interleaved, 2});
    EXPECT_EQ(cx.rounds, 2);
    EXPECT_EQ(cx.detectors.size(), static_cast<size_t>(4 * 2 + 4 + 4));
}

TEST(Code, NoiselessCircuitHasSilentDetectors) {
    const Layout lay = build_layout(3);
    for (auto basis : {StabilizerType::Z, StabilizerType::X}) {
        for (auto sched : {BasisScheduling::Sequential, BasisScheduling::Interleaved}) {
            const CircuitIR c = build_circuit(lay, {basis, sched, 2});
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                const Outcome o = simulate(c, seed);
                EXPECT_TRUE(o.detectors.empty());
                EXPECT_FALSE(o.observable);
            }
        }
    }
}

TEST(Code, PropagatorMatchesStateVector) {
    const Layout lay = build_layout(3);
    const CircuitIR c = build_circuit(lay, {StabilizerType::Z, BasisScheduling::Sequential, 2});
    const FaultPropagator prop(c);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pick(1, kPauliCount - 1);
    for (int marker = 0; marker < prop.n_markers(); ++marker) {
        for (int t = 0; t < 3; ++t) {
            const auto q = PauliString::from_index(pick(rng));
            const Outcome o = simulate(c, 100 + t, c.noise_markers[marker], q);
            const Signature sig = prop.signature(marker, q);
            EXPECT_EQ(sig.detectors(), o.detectors) << "marker " << marker << " " << q.label();
            EXPECT_EQ(sig.logical, o.observable) << "marker " << marker << " " << q.label();
        }
    }
}

TEST(Code, BulkDataErrorFiresTwoChecks) {
    const Layout lay = build_layout(3);
    const CircuitIR c = build_circuit(lay);
    const FaultPropagator prop(c);
    int end_of_round0 = 0;
    for (int i = 0; i < static_cast<int>(c.instructions.size()); ++i) {
        if (c.instructions[i].round == 0) {
            end_of_round0 = i;
        }
    }
    const int n = c.n_data + c.n_ancilla;
    std::vector<std::uint8_t> x(n, 0), z(n, 0);
    z[4] = 1;  // centre data qubit
    const Signature sz = prop.propagate(end_of_round0, x, z);
    ASSERT_EQ(sz.detectors().size(), 2u);
    for (int k : sz.detectors()) {
        EXPECT_EQ(c.detectors[k].basis, StabilizerType::X);
        EXPECT_EQ(c.detectors[k].round, 1);
    }
    EXPECT_FALSE(sz.logical);
    z[4] = 0;
    x[4] = 1;
    const Signature sx = prop.propagate(end_of_round0, x, z);
    ASSERT_EQ(sx.detectors().size(), 2u);
    for (int k : sx.detectors()) {
        EXPECT_EQ(c.detectors[k].basis, StabilizerType::Z);
    }
    // An X on column 0 is not a Z-type logical but flips the final Z readout of Z_L.
    x[4] = 0;
    x[3] = 1;
    EXPECT_TRUE(prop.propagate(end_of_round0, x, z).logical);
}

TEST(Code, MergeProbability) {
    EXPECT_DOUBLE_EQ(merge_probability(0.1, 0.1), 0.18);
    EXPECT_DOUBLE_EQ(merge_probability(0.0, 0.3), 0.3);
    EXPECT_DOUBLE_EQ(merge_probability(0.5, 0.2), 0.5);
}

TEST(Code, DemOfTrivialChannelIsEmpty) {
    const CircuitIR c = build_circuit(build_layout(3));
    const FaultPropagator prop(c);
    PauliChannel id;
    id.probs[0] = 1.0;
    const auto dem = enumerate_faults(c, prop, id);
    EXPECT_TRUE(dem.faults.empty());
    EXPECT_EQ(dem.n_detectors, 24);
    PauliChannel x_frame = id;
    x_frame.basis = StabilizerType::X;
    EXPECT_THROW(enumerate_faults(c, prop, x_frame), ValidationError);
}

TEST(Code, DemOfAncillaFlipsIsMeasurementErrors) {
    const CircuitIR c = build_circuit(build_layout(3));
    const FaultPropagator prop(c);
    const auto dem = enumerate_faults(c, prop, single_pauli_channel("ZIIII", 1e-3));
    ASSERT_EQ(dem.faults.size(), 24u);
    for (const auto &f : dem.faults) {
        EXPECT_DOUBLE_EQ(f.probability, 1e-3);
        EXPECT_FALSE(f.logical);
        ASSERT_FALSE(f.detectors.empty());
        const auto &first = c.detectors[f.detectors.front()];
        for (int k : f.detectors) {
            EXPECT_EQ(c.detectors[k].plaquette, first.plaquette);
        }
        if (first.basis == StabilizerType::Z) {
            EXPECT_EQ(f.detectors.size(), 2u);
        } else {
            EXPECT_LE(f.detectors.size(), 2u);
        }
    }
    // Ancilla X after the checks commutes with the X readout.
    EXPECT_TRUE(enumerate_faults(c, prop, single_pauli_channel("XIIII", 1e-3)).faults.empty());
}

TEST(Code, DemMergesIdenticalSignatures) {
    const CircuitIR c = build_circuit(build_layout(3));
    const FaultPropagator prop(c);
    // Y and Z on the ancilla have the same effect on the X readout.
    PauliChannel ch;
    ch.probs[0] = 0.8;
    ch.probs[PauliString::from_label("ZIIII").index()] = 0.1;
    ch.probs[PauliString::from_label("YIIII").index()] = 0.1;
    const auto dem = enumerate_faults(c, prop, ch);
    ASSERT_EQ(dem.faults.size(), 24u);
    for (const auto &f : dem.faults) {
        EXPECT_NEAR(f.probability, 0.18, 1e-15);
        EXPECT_NE(f.provenance.find("+1"), std::string::npos);
    }
    EXPECT_EQ(dem.to_csv().rfind("probability,detectors,logical,provenance\n", 0), 0u);
    EXPECT_TRUE(enumerate_faults(c, prop, ch, 0.2).faults.empty());
}
