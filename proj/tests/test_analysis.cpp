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
#include <random>

#include <gtest/gtest.h>

#include "rydqec/analysis.hpp"
#include "rydqec/errors.hpp"
#include "rydqec/experiment.hpp"
#include "rydqec/sampler.hpp"
#include "test_support.hpp"

using namespace rydqec;
using rydqec::testing::canonical_pulse;

namespace {

std::vector<double> grid() {
    return log_grid(1e-5, 1e-3, 8);
}

std::vector<PauliChannel> series_for(const IonizationSchedule &s, const std::vector<double> &gammas) {
    std::vector<PauliChannel> out;
    for (double g : gammas) {
        out.push_back(extract_pauli_channel(compose_plaquette(canonical_pulse(), {g, 1e-3}, s), canonical_pulse()));
    }
    return out;
}

LogicalPoint binomial_point(double gamma, double p, std::uint64_t shots, std::mt19937_64 &rng) {
    std::binomial_distribution<std::uint64_t> draw(shots, p);
    const auto k = draw(rng);
    const auto ci = wilson_interval(k, shots);
    return {gamma, static_cast<double>(k) / shots, ci.lo, ci.hi, shots};
}

}  // namespace

TEST(Analysis, FitOrderSyntheticLinear) {
    std::vector<double> l;
    for (double g : grid()) {
        l.push_back(3 * g);
    }
    const auto f = fit_order(grid(), l);
    EXPECT_EQ(f.n, 1);
    EXPECT_NEAR(f.A, 3.0, 1e-9);
    EXPECT_NEAR(f.B, 0.0, 1e-6);
}

TEST(Analysis, FitOrderSyntheticQuadratic) {
    std::vector<double> l;
    for (double g : grid()) {
        l.push_back(2 * g * g + 5 * g * g * g);
    }
    const auto f = fit_order(grid(), l);
    EXPECT_EQ(f.n, 2);
    EXPECT_NEAR(f.A, 2.0, 1e-6);
    EXPECT_NEAR(f.B, 5.0, 1e-6);
    EXPECT_THROW(fit_order({1e-5, 1e-4}, {1e-5, 1e-4}), ValidationError);
}

TEST(Analysis, HookPredicateExamples) {
    // X-plaquette readout slots run NW, SW, NE, SE; Z-plaquette slots NW, NE, SW, SE.
    EXPECT_TRUE(hook_predicate(PauliString::from_label("IZZII"), StabilizerType::X, StabilizerType::X));
    EXPECT_FALSE(hook_predicate(PauliString::from_label("IZIZI"), StabilizerType::X, StabilizerType::X));
    EXPECT_FALSE(hook_predicate(PauliString::from_label("IZIIZ"), StabilizerType::X, StabilizerType::X));
    EXPECT_TRUE(hook_predicate(PauliString::from_label("IXXII"), StabilizerType::Z, StabilizerType::Z));
    EXPECT_FALSE(hook_predicate(PauliString::from_label("IXIXI"), StabilizerType::Z, StabilizerType::Z));
    for (auto det : {StabilizerType::X, StabilizerType::Z}) {
        for (auto plaq : {StabilizerType::X, StabilizerType::Z}) {
            EXPECT_FALSE(hook_predicate(PauliString::from_label("XIIII"), det, plaq));
            EXPECT_FALSE(hook_predicate(PauliString::from_label("ZIIII"), det, plaq));
        }
    }
    // Three Z errors on a Z plaquette equal one Z up to the stabilizer.
    EXPECT_FALSE(hook_predicate(PauliString::from_label("IZZZI"), StabilizerType::X, StabilizerType::Z));
    EXPECT_TRUE(hook_predicate(PauliString::from_label("IZZZI"), StabilizerType::X, StabilizerType::X));
}

TEST(Analysis, HookPredicateMatchesLayoutGeometry) {
    const Layout layout = build_layout(5);
    for (auto type : {StabilizerType::X, StabilizerType::Z}) {
        const Plaquette *bulk = nullptr;
        for (const auto &p : layout.plaquettes) {
            if (p.type == type && p.weight() == 4) {
                bulk = &p;
                break;
            }
        }
        ASSERT_NE(bulk, nullptr);
        for (int k = 0; k < kPauliCount; ++k) {
            const auto s = PauliString::from_index(k);
            for (auto det : {StabilizerType::X, StabilizerType::Z}) {
                std::vector<int> qubits;
                for (int slot = 0; slot < 4; ++slot) {
                    if (det == StabilizerType::X ? s.z_bit(slot + 1) : s.x_bit(slot + 1)) {
                        qubits.push_back(bulk->data[slot]);
                    }
                }
                if (qubits.size() != 2) {
                    continue;
                }
                const bool aligned = det == StabilizerType::X
                                         ? layout.data_col(qubits[0]) == layout.data_col(qubits[1])
                                         : layout.data_row(qubits[0]) == layout.data_row(qubits[1]);
                EXPECT_EQ(hook_predicate(s, det, type), aligned) << s.label();
            }
        }
    }
}

TEST(Analysis, FitNuSynthetic) {
    std::vector<LogicalPoint> pts;
    for (double g : log_grid(1e-4, 1e-3, 6)) {
        const double p = 1e-2 * g * g;
        pts.push_back({g, p, 0.95 * p, 1.05 * p, 1000000});
    }
    const auto f = fit_nu(pts, 3, "synthetic");
    EXPECT_NEAR(f.nu, 2.0, 1e-9);
    EXPECT_EQ(f.n_points, 6);
    NuWindow lowest{0.2, std::numeric_limits<double>::infinity(), 3, 3};
    const auto g = fit_nu(pts, 3, "synthetic", lowest);
    EXPECT_EQ(g.n_points, 3);
    EXPECT_DOUBLE_EQ(g.gamma_min, 1e-4);
}

TEST(Analysis, FitNuRecoversKnownExponents) {
    std::mt19937_64 rng(37);
    for (double nu : {1.0, 1.5, 2.0, 3.0}) {
        std::vector<LogicalPoint> pts;
        for (double g : log_grid(1e-3, 1e-2, 6)) {
            pts.push_back(binomial_point(g, 0.2 * std::pow(g / 1e-2, nu), 1000000, rng));
        }
        const auto f = fit_nu(pts, 3, "synthetic");
        EXPECT_LT(std::abs(f.nu - nu), 2 * f.stderr_nu) << "nu=" << nu << " fit=" << f.nu << " +- " << f.stderr_nu;
    }
}

TEST(Analysis, FitNuRefusesWithoutWindow) {
    std::vector<LogicalPoint> pts{{1e-4, 1e-6, 0.0, 1e-5, 1000}, {2e-4, 0.5, 0.4, 0.6, 100}};
    EXPECT_THROW(fit_nu(pts, 3, "sparse"), ValidationError);
}

TEST(Analysis, CensusPerfectIonizationHasNoHooks) {
    const IonizationSchedule all{ScheduleKind::AfterEveryGateBoth, 1.0};
    const auto c = census(series_for(all, grid()), series_for(all, {kReferenceGamma})[0]);
    EXPECT_EQ(c.total(), 0);
}

TEST(Analysis, CensusNoIonizationHasHooks) {
    const IonizationSchedule none{ScheduleKind::None, 1.0};
    const auto c = census(series_for(none, grid()), series_for(none, {kReferenceGamma})[0]);
    EXPECT_GT(c.count(StabilizerType::X), 0);
    EXPECT_GT(c.count(StabilizerType::Z), 0);
    for (const auto &h : c.hooks) {
        EXPECT_EQ(h.fit.n, 1);
        EXPECT_GT(h.amplitude_at_ref, 0.0);
    }
}

TEST(Analysis, OrderIsStableUnderThinningTheGrid) {
    const IonizationSchedule none{ScheduleKind::None, 1.0};
    const auto full = series_for(none, grid());
    std::vector<double> g_full, g_half;
    for (size_t i = 0; i < full.size(); ++i) {
        g_full.push_back(full[i].gamma);
        if (i % 2 == 0) {
            g_half.push_back(full[i].gamma);
        }
    }
    int checked = 0;
    for (int k = 1; k < kPauliCount; ++k) {
        std::vector<double> l_full, l_half;
        for (size_t i = 0; i < full.size(); ++i) {
            l_full.push_back(full[i].probs[k]);
            if (i % 2 == 0) {
                l_half.push_back(full[i].probs[k]);
            }
        }
        if (l_full.front() < 1e-11) {
            continue;
        }
        const auto a = fit_order(g_full, l_full);
        const auto b = fit_order(g_half, l_half);
        EXPECT_GE(a.n, 1) << PauliString::from_index(k).label();
        EXPECT_EQ(a.n, b.n) << PauliString::from_index(k).label();
        ++checked;
    }
    EXPECT_GT(checked, 100);
}
