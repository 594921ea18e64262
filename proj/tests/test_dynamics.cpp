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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "rydqec/dynamics.hpp"
#include "rydqec/errors.hpp"
#include "test_support.hpp"

using namespace rydqec;
using rydqec::testing::canonical_pulse;

namespace {

CMat apply1(const QutritChannel &ch, const CMat &rho) {
    return unvec(ch.superop * vec(rho), static_cast<int>(rho.rows()));
}

CMat ket_bra3(int a, int b) {
    CMat m = CMat::Zero(3, 3);
    m(a, b) = 1.0;
    return m;
}

// Row-major Liouvillian of H plus jump operators.
CMat liouvillian(const CMat &h, const std::vector<CMat> &jumps) {
    const int n = static_cast<int>(h.rows());
    const CMat id = CMat::Identity(n, n);
    CMat l = -kI * (kron(h, id) - kron(id, h.transpose()));
    for (const auto &j : jumps) {
        const CMat jj = j.adjoint() * j;
        l += kron(j, j.conjugate()) - 0.5 * kron(jj, id) - 0.5 * kron(id, jj.transpose());
    }
    return l;
}

CMat pair_hamiltonian(double phase) {
    CMat h = CMat::Zero(3, 3);
    h(2, 1) = 0.5 * std::polar(1.0, phase);
    h(1, 2) = std::conj(h(2, 1));
    const CMat id = CMat::Identity(3, 3);
    CMat big = kron(h, id) + kron(id, h);
    big.row(8).setZero();
    big.col(8).setZero();
    return big;
}

CMat lindblad_gate(const PulseProfile &p, double gamma) {
    const CMat id = CMat::Identity(3, 3);
    std::vector<CMat> jumps;
    for (int q : {0, 1}) {
        const CMat l = std::sqrt(gamma / 2) * ket_bra3(q, 2);
        jumps.push_back(kron(l, id));
        jumps.push_back(kron(id, l));
    }
    CMat s = CMat::Identity(81, 81);
    for (const auto &seg : p.segments) {
        const CMat gen = liouvillian(pair_hamiltonian(seg.phase), jumps) * seg.duration;
        s = CMat(gen.exp()) * s;
    }
    return s;
}

int qutrit_index(int qubits) {
    int idx = 0;
    for (int a = 0; a < kPlaquetteAtoms; ++a) {
        idx = 3 * idx + ((qubits >> (kPlaquetteAtoms - 1 - a)) & 1);
    }
    return idx;
}

CMat embed(const CMat &sigma32) {
    CMat big = CMat::Zero(kPlaquetteDim, kPlaquetteDim);
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            big(qutrit_index(i), qutrit_index(j)) = sigma32(i, j);
        }
    }
    return big;
}

double rydberg_population(const CMat &rho) {
    double pop = 0;
    for (int i = 0; i < kPlaquetteDim; ++i) {
        int x = i;
        bool any_r = false;
        for (int a = 0; a < kPlaquetteAtoms; ++a) {
            any_r |= x % 3 == 2;
            x /= 3;
        }
        if (any_r) {
            pop += rho(i, i).real();
        }
    }
    return pop;
}

bool same_superop(const QutritChannel &a, const QutritChannel &b) {
    return a.active == b.active && a.superop.rows() == b.superop.rows() && (a.superop - b.superop).norm() < 1e-14;
}

}  // namespace

TEST(Dynamics, GateChannelMatchesLindbladExponential) {
    const double gamma = 1e-2;
    const CMat oracle = lindblad_gate(canonical_pulse(), gamma);
    const auto ch = gate_channel(canonical_pulse(), {gamma, 1e-3});
    EXPECT_LT((ch.superop - oracle).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Dynamics, NoiselessGateIsConjugationByFull9) {
    const auto ch = gate_channel(canonical_pulse(), {0.0, 1e-3});
    const CMat full9 = propagate_restricted(canonical_pulse()).full9;
    EXPECT_LT((ch.superop - unitary_superop(full9)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dynamics, GateChannelIsCptpAndDtConverged) {
    const auto a = gate_channel(canonical_pulse(), {1e-3, 1e-3});
    const auto b = gate_channel(canonical_pulse(), {1e-3, 5e-4});
    EXPECT_LT(trace_preservation_error(a.superop, 9), 1e-10);
    EXPECT_GT(min_choi_eigenvalue(a.superop, 9), -1e-12);
    EXPECT_LT((choi(a.superop, 9) - choi(b.superop, 9)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Dynamics, GroundPairIsDark) {
    const auto ch = gate_channel(canonical_pulse(), {5e-3, 1e-3});
    CMat rho = CMat::Zero(9, 9);
    rho(0, 0) = 1.0;
    EXPECT_LT((apply1(ch, rho) - rho).norm(), 1e-12);
}

TEST(Dynamics, IdleDecay) {
    CMat rho = CMat::Zero(3, 3);
    rho(2, 2) = 0.6;
    rho(1, 1) = 0.4;
    rho(1, 2) = rho(2, 1) = 0.3;
    EXPECT_LT((apply1(idle_decay_channel(0.0, 0.1), rho) - rho).norm(), 1e-15);

    const auto half = apply1(idle_decay_channel(std::log(2.0), 1.0), rho);
    EXPECT_NEAR(half(2, 2).real(), 0.3, 1e-14);
    EXPECT_NEAR(std::abs(half(1, 2)), 0.3 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(half(0, 0).real(), 0.15, 1e-14);
    EXPECT_NEAR(half(1, 1).real(), 0.55, 1e-14);

    const auto full = apply1(idle_decay_channel(1e3, 1.0), rho);
    EXPECT_NEAR(full(2, 2).real(), 0.0, 1e-14);
    EXPECT_NEAR(full(0, 0).real(), 0.3, 1e-14);
    EXPECT_NEAR(full(1, 1).real(), 0.7, 1e-14);
}

TEST(Dynamics, Ionization) {
    CMat rho = CMat::Zero(3, 3);
    rho(2, 2) = 0.3;
    rho(1, 1) = 0.7;
    rho(1, 2) = rho(2, 1) = 0.2;
    EXPECT_LT((apply1(ionization_channel(0.0), rho) - rho).norm(), 1e-15);

    const auto out = apply1(ionization_channel(1.0), rho);
    EXPECT_NEAR(out(0, 0).real(), 0.3, 1e-15);
    EXPECT_NEAR(out.row(2).norm() + out.col(2).norm(), 0.0, 1e-15);

    const auto twice = apply1(ionization_channel(0.75), apply1(ionization_channel(0.75), rho));
    const auto once = apply1(ionization_channel(0.9375), rho);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(twice(i, i).real(), once(i, i).real(), 1e-15);
    }
    EXPECT_THROW(ionization_channel(1.5), ValidationError);
}

TEST(Dynamics, TerminalProjection) {
    const auto proj = terminal_projection();
    const CMat out = apply1(proj, ket_bra3(2, 2));
    EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 0.5, 1e-15);

    CMat qubit = CMat::Zero(3, 3);
    qubit.topLeftCorner(2, 2) << 0.5, 0.2, 0.2, 0.5;
    EXPECT_LT((apply1(proj, qubit) - qubit).norm(), 1e-15);

    CMat plus = CMat::Zero(3, 3);
    plus(1, 1) = plus(2, 2) = plus(1, 2) = plus(2, 1) = 0.5;
    const CMat p = apply1(proj, plus);
    EXPECT_NEAR(p(0, 0).real(), 0.25, 1e-15);
    EXPECT_NEAR(p(1, 1).real(), 0.75, 1e-15);
    EXPECT_NEAR(p.row(2).norm(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p(0, 1)), 0.0, 1e-15);
}

TEST(Dynamics, NoiselessPlaquetteIsCzLayer) {
    std::mt19937_64 rng(17);
    const CMat sigma = random_pure_state(32, rng);
    CMat u = CMat::Zero(32, 32);
    for (int i = 0; i < 32; ++i) {
        const int anc = (i >> 4) & 1;
        const int data_ones = __builtin_popcount(i & 0xF);
        u(i, i) = (anc && (data_ones & 1)) ? -1.0 : 1.0;
    }
    for (const auto &s : {IonizationSchedule{ScheduleKind::None, 1.0}, IonizationSchedule{ScheduleKind::AncillaTwice, 1.0},
                          IonizationSchedule{ScheduleKind::AfterEveryGateBoth, 0.5}}) {
        const auto ch = compose_plaquette(canonical_pulse(), {0.0, 1e-3}, s);
        const CMat out = ch.apply(embed(sigma));
        EXPECT_LT((out - embed(u * sigma * u)).norm(), 1e-9) << s.label();
    }
}

TEST(Dynamics, IonizationRemovesRydbergPopulationBeforeNextGate) {
    CMat plus = CMat::Constant(32, 32, 1.0 / 32);
    auto r_before_second_gate = [&](const IonizationSchedule &s) {
        const auto ch = compose_plaquette(canonical_pulse(), {1e-3, 1e-3}, s);
        CMat rho = embed(plus);
        int gates = 0;
        for (const auto &stage : ch.stages) {
            if (stage.active.size() == 2 && ++gates == 2) {
                break;
            }
            rho = apply_stage(stage, rho);
        }
        return rydberg_population(rho);
    };
    EXPECT_GT(r_before_second_gate({ScheduleKind::None, 1.0}), 1e-6);
    EXPECT_LT(r_before_second_gate({ScheduleKind::AfterEveryGateBoth, 1.0}), 1e-15);
}

TEST(Dynamics, SelectedLocationPlacement) {
    const auto ion = ionization_channel(1.0, 0);
    auto ionized_after = [&](const IonizationSchedule &s) {
        const auto ch = compose_plaquette(canonical_pulse(), {1e-3, 1e-3}, s);
        std::vector<int> out;
        int gates = 0;
        for (const auto &stage : ch.stages) {
            gates += stage.active.size() == 2;
            if (same_superop(stage, ion)) {
                out.push_back(gates);
            }
        }
        return out;
    };
    EXPECT_EQ(ionized_after({ScheduleKind::AncillaTwice, 1.0}), (std::vector<int>{1, 3}));
    EXPECT_EQ(ionized_after({ScheduleKind::AncillaHalfway, 1.0}), (std::vector<int>{2}));
    EXPECT_EQ(ionized_after({ScheduleKind::AncillaOnlyEveryGate, 1.0}), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_TRUE(ionized_after({ScheduleKind::DataOnlyEveryGate, 1.0}).empty());
    EXPECT_TRUE(ionized_after({ScheduleKind::None, 1.0}).empty());
}

TEST(Dynamics, StageApplicationPathsAgree) {
    std::mt19937_64 rng(23);
    const CMat rho = random_pure_state(kPlaquetteDim, rng);
    const auto gate = gate_channel(canonical_pulse(), {2e-3, 1e-3}, 0, 3);
    const auto idle = idle_decay_channel(3.0, 0.01, 2);
    for (const auto &st : {gate, idle}) {
        EXPECT_LT((apply_stage(st, rho) - apply_stage_dense(st, rho)).norm(), 1e-12);
    }
}

TEST(Dynamics, ChannelFileRoundTrip) {
    const auto dir = rydqec::testing::scratch_dir("channel_io");
    const auto ch = compose_plaquette(canonical_pulse(), {1e-3, 1e-3}, {ScheduleKind::AncillaHalfway, 1.0});
    save_channel(ch, dir / "c.bin");
    const auto back = load_channel(dir / "c.bin");
    ASSERT_EQ(back.stages.size(), ch.stages.size());
    EXPECT_EQ(back.pulse_id, ch.pulse_id);
    EXPECT_EQ(back.schedule, ch.schedule);
    for (size_t i = 0; i < ch.stages.size(); ++i) {
        EXPECT_TRUE(same_superop(back.stages[i], ch.stages[i]));
    }
}

TEST(Dynamics, ScheduleLabels) {
    for (const auto &s : selected_location_schedules()) {
        EXPECT_EQ(IonizationSchedule::parse(s.label()), s);
    }
    const auto p = IonizationSchedule::parse("AfterEveryGateBoth@0.75");
    EXPECT_EQ(p.kind, ScheduleKind::AfterEveryGateBoth);
    EXPECT_EQ(p.p_depl, 0.75);
    EXPECT_THROW(IonizationSchedule::parse("Sometimes"), ValidationError);
    EXPECT_THROW(IonizationSchedule::parse("AncillaTwice@0.5"), ValidationError);
    EXPECT_THROW(IonizationSchedule::parse("AfterEveryGateBoth@x"), ValidationError);
    EXPECT_THROW((NoiseParams{20.0, 1e-3}.validate()), ValidationError);
}
