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

#include "rydqec/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

PowerLawFit fit_order(const std::vector<double> &gammas, const std::vector<double> &lambdas) {
    require(gammas.size() == lambdas.size(), "fit_order: gamma and lambda series differ in length");
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < gammas.size(); ++i) {
        if (gammas[i] > 0 && lambdas[i] >= kLambdaFloor) {
            pts.emplace_back(gammas[i], lambdas[i]);
        }
    }
    require(pts.size() >= 3, "fit_order: fewer than 3 usable points");
    std::sort(pts.begin(), pts.end());
    const double slope = std::log(pts[1].second / pts[0].second) / std::log(pts[1].first / pts[0].first);
    PowerLawFit fit;
    fit.n = static_cast<int>(std::lround(slope));
    Eigen::MatrixXd a(pts.size(), 2);
    Eigen::VectorXd b(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto [g, l] = pts[i];
        a(i, 0) = std::pow(g, fit.n) / l;
        a(i, 1) = std::pow(g, fit.n + 1) / l;
        b[i] = 1.0;
        fit.gamma_window.push_back(g);
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
    fit.A = coef[0];
    fit.B = coef[1];
    fit.rms = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(pts.size()));
    return fit;
}

PauliString real_frame(const PauliString &cz_frame, StabilizerType plaquette) {
    return plaquette == StabilizerType::Z ? cz_frame : hadamard_data(cz_frame);
}

bool hook_predicate(const PauliString &p, StabilizerType detecting, StabilizerType plaquette) {
    // Errors flagged by X checks are Z-type; they degrade distance when aligned with Z_L.
    const bool want_z = detecting == StabilizerType::X;
    std::vector<int> support;
    for (int slot = 0; slot < 4; ++slot) {
        const int q = slot + 1;
        if (want_z ? p.z_bit(q) : p.x_bit(q)) {
            support.push_back(slot);
        }
    }
    const bool same_type = (want_z && plaquette == StabilizerType::Z) || (!want_z && plaquette == StabilizerType::X);
    if (same_type && support.size() > 2) {
        std::vector<int> rest;
        for (int slot = 0; slot < 4; ++slot) {
            if (std::find(support.begin(), support.end(), slot) == support.end()) {
                rest.push_back(slot);
            }
        }
        support = rest;
    }
    const auto slots = readout_slots(plaquette);
    const int axis = want_z ? 0 : 1;  // shared column for vertical pairs, shared row for horizontal
    for (size_t i = 0; i < support.size(); ++i) {
        for (size_t j = i + 1; j < support.size(); ++j) {
            if (slots[support[i]][axis] == slots[support[j]][axis]) {
                return true;
            }
        }
    }
    return false;
}

int ScheduleCensus::count(StabilizerType basis) const {
    int n = 0;
    for (const auto &h : hooks) {
        n += h.basis == basis;
    }
    return n;
}

ScheduleCensus census(const std::vector<PauliChannel> &series, const PauliChannel &at_ref) {
    require(!series.empty(), "census: empty channel series");
    std::vector<double> gammas;
    for (const auto &ch : series) {
        require(ch.schedule == series.front().schedule, "census: mixed schedules in one series");
        require(ch.basis == StabilizerType::Z, "census: channels must be in the CZ frame");
        gammas.push_back(ch.gamma);
    }
    require(at_ref.schedule == series.front().schedule, "census: reference channel has a different schedule");
    ScheduleCensus out;
    out.schedule = series.front().schedule;
    for (auto basis : {StabilizerType::Z, StabilizerType::X}) {
        for (int k = 1; k < kPauliCount; ++k) {
            const auto q = PauliString::from_index(k);
            const auto real = real_frame(q, basis);
            if (!hook_predicate(real, StabilizerType::X, basis) && !hook_predicate(real, StabilizerType::Z, basis)) {
                continue;
            }
            std::vector<double> lambdas;
            int usable = 0;
            for (const auto &ch : series) {
                lambdas.push_back(ch.probs[k]);
                usable += ch.probs[k] >= kLambdaFloor;
            }
            if (usable < 3) {
                continue;
            }
            const PowerLawFit fit = fit_order(gammas, lambdas);
            if (fit.n == 1) {
                out.hooks.push_back({real, basis, fit, at_ref.probs[k]});
            }
        }
    }
    return out;
}

NuFit fit_nu(const std::vector<LogicalPoint> &points, int d, const std::string &schedule, const NuWindow &window) {
    std::vector<LogicalPoint> usable;
    for (const auto &pt : points) {
        if (pt.p_L <= 0 || pt.gamma <= 0 || pt.gamma > window.gamma_max || pt.ci_lo <= 0) {
            continue;
        }
        const double rel = 0.5 * (pt.ci_hi - pt.ci_lo) / pt.p_L;
        if (rel < window.max_rel_halfwidth) {
            usable.push_back(pt);
        }
    }
    std::sort(usable.begin(), usable.end(), [](const auto &a, const auto &b) { return a.gamma < b.gamma; });
    if (static_cast<int>(usable.size()) > window.max_points) {
        usable.resize(window.max_points);
    }
    if (static_cast<int>(usable.size()) < window.min_points) {
        throw ValidationError("fit_nu: only " + std::to_string(usable.size()) + " points qualify for d=" +
                              std::to_string(d) + " " + schedule + " (need " + std::to_string(window.min_points) +
                              " with relative CI half-width < " + format_double(window.max_rel_halfwidth) + ")");
    }
    const auto n = static_cast<Eigen::Index>(usable.size());
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto &pt = usable[i];
        x(i, 0) = 1.0;
        x(i, 1) = std::log(pt.gamma);
        y[i] = std::log(pt.p_L);
        const double sigma = (std::log(pt.ci_hi) - std::log(pt.ci_lo)) / (2 * 1.959963984540054);
        w[i] = 1.0 / (sigma * sigma);
    }
    const Eigen::Matrix2d normal = x.transpose() * w.asDiagonal() * x;
    const Eigen::Vector2d rhs = x.transpose() * w.asDiagonal() * y;
    const Eigen::Matrix2d cov = normal.inverse();
    const Eigen::Vector2d beta = cov * rhs;
    NuFit fit;
    fit.nu = beta[1];
    fit.stderr_nu = std::sqrt(cov(1, 1));
    fit.gamma_min = usable.front().gamma;
    fit.gamma_max = usable.back().gamma;
    fit.n_points = static_cast<int>(n);
    fit.d = d;
    fit.schedule = schedule;
    return fit;
}

}  // namespace rydqec
