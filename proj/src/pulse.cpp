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

#include "rydqec/pulse.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <ceres/ceres.h>
#include "json.hpp"

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double wrap_angle(double a) {
    a = std::remainder(a, 2 * std::numbers::pi);
    if (a <= -std::numbers::pi) {
        a += 2 * std::numbers::pi;
    }
    return a;
}

Mat2 segment_derivative(double duration, double phase, double coupling) {
    const double s = std::sin(coupling * duration / 2);
    Mat2 d;
    d << 0.0, -std::polar(s, -phase), std::polar(s, phase), 0.0;
    return d;
}

// Residuals for a fixed-duration segment grid: the leakage amplitudes <0r|u1|01> and <W+|u2|11>
// together with arg(-c2 conj(c1)^2), where c1 = <01|u1|01> and c2 = <11|u2|11>. All three vanish
// transversally at a CZ (the diagonal amplitudes alone sit on the boundary |c| <= 1).
class CzGateResidual final : public ceres::CostFunction {
  public:
    CzGateResidual(int n_segments, double segment_duration) : n_(n_segments), tau_(segment_duration) {
        set_num_residuals(5);
        mutable_parameter_block_sizes()->push_back(n_segments);
    }

    bool Evaluate(double const *const *parameters, double *residuals, double **jacobians) const override {
        const double *phases = parameters[0];
        const double couplings[2] = {1.0, kSqrt2};
        cplx c[2], b[2];
        std::vector<cplx> dc[2], db[2];
        const bool want_jacobian = jacobians != nullptr && jacobians[0] != nullptr;
        for (int sector = 0; sector < 2; ++sector) {
            std::vector<Mat2> m(n_);
            for (int j = 0; j < n_; ++j) {
                m[j] = segment_unitary(tau_, phases[j], couplings[sector]);
            }
            // prefix[j] = M_{j-1} ... M_0 e0
            std::vector<Eigen::Vector2cd> prefix(n_ + 1);
            prefix[0] = Eigen::Vector2cd(1.0, 0.0);
            for (int j = 0; j < n_; ++j) {
                prefix[j + 1] = m[j] * prefix[j];
            }
            c[sector] = prefix[n_][0];
            b[sector] = prefix[n_][1];
            if (want_jacobian) {
                dc[sector].resize(n_);
                db[sector].resize(n_);
                Eigen::Matrix2cd rows = Eigen::Matrix2cd::Identity();
                for (int j = n_ - 1; j >= 0; --j) {
                    const Eigen::Vector2cd d =
                        rows * segment_derivative(tau_, phases[j], couplings[sector]) * prefix[j];
                    dc[sector][j] = d[0];
                    db[sector][j] = d[1];
                    rows = rows * m[j];
                }
            }
        }
        const cplx g = -c[1] * std::conj(c[0]) * std::conj(c[0]);
        residuals[0] = b[0].real();
        residuals[1] = b[0].imag();
        residuals[2] = b[1].real();
        residuals[3] = b[1].imag();
        residuals[4] = std::arg(g);
        if (want_jacobian) {
            double *jac = jacobians[0];
            for (int j = 0; j < n_; ++j) {
                const cplx dg = -dc[1][j] * std::conj(c[0]) * std::conj(c[0]) -
                                2.0 * c[1] * std::conj(c[0]) * std::conj(dc[0][j]);
                jac[0 * n_ + j] = db[0][j].real();
                jac[1 * n_ + j] = db[0][j].imag();
                jac[2 * n_ + j] = db[1][j].real();
                jac[3 * n_ + j] = db[1][j].imag();
                jac[4 * n_ + j] = (std::conj(g) * dg).imag() / std::norm(g);
            }
        }
        return true;
    }

  private:
    int n_;
    double tau_;
};

PulseProfile make_profile(const std::vector<double> &phases, double total_time) {
    PulseProfile p;
    const double tau = total_time / static_cast<double>(phases.size());
    for (double phi : phases) {
        p.segments.push_back({tau, wrap_angle(phi)});
    }
    auto check = verify_cz_algebra(propagate_restricted(p));
    p.theta = check.theta;
    p.residual = check.residual;
    return p;
}

PulseProfile solve_at(double total_time, std::vector<double> phases, int max_iterations) {
    const int n = static_cast<int>(phases.size());
    ceres::Problem problem;
    problem.AddResidualBlock(new CzGateResidual(n, total_time / n), nullptr, phases.data());
    ceres::Solver::Options opts;
    opts.minimizer_type = ceres::TRUST_REGION;
    opts.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
    opts.linear_solver_type = ceres::DENSE_QR;
    opts.max_num_iterations = max_iterations;
    opts.function_tolerance = 1e-30;
    opts.gradient_tolerance = 1e-30;
    opts.parameter_tolerance = 1e-18;
    opts.logging_type = ceres::SILENT;
    opts.num_threads = 1;
    ceres::Solver::Summary summary;
    ceres::Solve(opts, &problem, &summary);
    return make_profile(phases, total_time);
}

}  // namespace

Blockade GateModel::blockade(int atom_i, int atom_j) const {
    return (atom_i != atom_j && (atom_i == 0 || atom_j == 0)) ? Blockade::Infinite : Blockade::None;
}

void GateModel::validate() const {
    require(omega_max > 0 && std::isfinite(omega_max), "GateModel: omega_max must be positive");
    require(delta_e == 0.0, "GateModel: delta_e must be 0 in the rotating frame");
}

double PulseProfile::total_time() const {
    double t = 0;
    for (const auto &s : segments) {
        t += s.duration;
    }
    return t;
}

void PulseProfile::validate() const {
    for (const auto &s : segments) {
        require(s.duration > 0 && std::isfinite(s.duration), "PulseProfile: segment durations must be > 0");
        require(std::isfinite(s.phase), "PulseProfile: non-finite phase");
    }
    require(theta > -std::numbers::pi && theta <= std::numbers::pi, "PulseProfile: theta outside (-pi, pi]");
}

std::string PulseProfile::id() const {
    return sha256_hex(pulse_csv(*this)).substr(0, 16);
}

Mat2 segment_unitary(double duration, double phase, double coupling) {
    const double a = coupling * duration / 2;
    const double c = std::cos(a);
    const double s = std::sin(a);
    Mat2 m;
    m << c, -kI * std::polar(s, -phase), -kI * std::polar(s, phase), c;
    return m;
}

Mat9 assemble_full9(const Mat2 &u1, const Mat2 &u2) {
    Mat9 f = Mat9::Zero();
    f(0, 0) = 1.0;
    f(8, 8) = 1.0;
    // {|01>, |0r>} = {1, 2} and its mirror {|10>, |r0>} = {3, 6}
    const int sym[2][2] = {{1, 2}, {3, 6}};
    for (const auto &idx : sym) {
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                f(idx[i], idx[j]) = u1(i, j);
            }
        }
    }
    Eigen::Matrix<cplx, 9, 1> b0 = Eigen::Matrix<cplx, 9, 1>::Zero();
    Eigen::Matrix<cplx, 9, 1> wp = Eigen::Matrix<cplx, 9, 1>::Zero();
    Eigen::Matrix<cplx, 9, 1> wm = Eigen::Matrix<cplx, 9, 1>::Zero();
    b0[4] = 1.0;
    wp[5] = wp[7] = 1.0 / kSqrt2;
    wm[5] = 1.0 / kSqrt2;
    wm[7] = -1.0 / kSqrt2;
    const Eigen::Matrix<cplx, 9, 1> basis[2] = {b0, wp};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            f += u2(i, j) * basis[i] * basis[j].adjoint();
        }
    }
    f += wm * wm.adjoint();
    return f;
}

Mat9 pair_step_unitary(double duration, double phase) {
    return assemble_full9(segment_unitary(duration, phase, 1.0), segment_unitary(duration, phase, kSqrt2));
}

RestrictedUnitary propagate_restricted(const PulseProfile &profile) {
    RestrictedUnitary u;
    for (const auto &s : profile.segments) {
        u.u1 = segment_unitary(s.duration, s.phase, 1.0) * u.u1;
        u.u2 = segment_unitary(s.duration, s.phase, kSqrt2) * u.u2;
    }
    u.full9 = assemble_full9(u.u1, u.u2);
    return u;
}

RestrictedUnitary ideal_cz_unitary(double theta) {
    RestrictedUnitary u;
    u.u1 << std::polar(1.0, theta), 0.0, 0.0, std::polar(1.0, -theta);
    u.u2 << -std::polar(1.0, 2 * theta), 0.0, 0.0, -std::polar(1.0, -2 * theta);
    u.full9 = assemble_full9(u.u1, u.u2);
    return u;
}

CzAlgebraCheck verify_cz_algebra(const RestrictedUnitary &u) {
    const double theta = std::arg(u.u1(0, 0));
    const cplx e1 = std::polar(1.0, theta);
    const cplx e2 = std::polar(1.0, 2 * theta);
    const Eigen::Vector2cd g(1.0, 0.0);
    const Eigen::Vector2cd x(0.0, 1.0);
    double r = 0;
    r = std::max(r, (u.u1 * g - e1 * g).norm());
    r = std::max(r, (u.u2 * g + e2 * g).norm());
    // det(u1) = det(u2) = 1 fixes the excited-state phases.
    r = std::max(r, (u.u1 * x - std::conj(e1) * x).norm());
    r = std::max(r, (u.u2 * x + std::conj(e2) * x).norm());

    using V9 = Eigen::Matrix<cplx, 9, 1>;
    V9 k1r = V9::Zero(), kr1 = V9::Zero(), wm = V9::Zero();
    k1r[5] = 1.0;
    kr1[7] = 1.0;
    wm[5] = 1.0 / kSqrt2;
    wm[7] = -1.0 / kSqrt2;
    r = std::max(r, (u.full9 * wm - wm).norm());
    const cplx hop_same = std::conj(e1) * kI * std::sin(theta);
    const cplx hop_swap = -std::conj(e1) * std::cos(theta);
    r = std::max(r, (u.full9 * k1r - (hop_same * k1r + hop_swap * kr1)).norm());
    r = std::max(r, (u.full9 * kr1 - (hop_same * kr1 + hop_swap * k1r)).norm());
    return {theta, r};
}

PulseProfile synthesize_pulse(const GateModel &model, const SynthesisOptions &options) {
    model.validate();
    require(options.n_segments >= 8, "synthesize_pulse: n_segments must be >= 8");
    require(options.tol >= 1e-10, "synthesize_pulse: tol must be >= 1e-10");
    require(options.t_min > 0 && options.t_max > options.t_min, "synthesize_pulse: invalid time bracket");

    // Random starts are smooth phase profiles A cos(w t - f) + d t, the family the time-optimal
    // pulse belongs to; fully random phases converge far more slowly.
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto random_phases = [&](double total_time) {
        const double amp = 6 * unit(rng) - 3;
        const double freq = 0.3 + 1.7 * unit(rng);
        const double slope = 3 * unit(rng) - 1.5;
        const double offset = 2 * std::numbers::pi * unit(rng);
        std::vector<double> p(options.n_segments);
        for (int j = 0; j < options.n_segments; ++j) {
            const double t = (j + 0.5) * total_time / options.n_segments;
            p[j] = amp * std::cos(freq * t - offset) + slope * t;
        }
        return p;
    };
    auto attempt = [&](double t, const std::vector<double> *warm) {
        PulseProfile best;
        best.residual = std::numeric_limits<double>::infinity();
        if (warm != nullptr) {
            best = solve_at(t, *warm, options.max_iterations);
            if (best.residual < options.tol) {
                return best;
            }
        }
        for (int k = 0; k < options.random_starts; ++k) {
            PulseProfile p = solve_at(t, random_phases(t), options.max_iterations);
            if (p.residual < best.residual) {
                best = p;
            }
            if (best.residual < options.tol) {
                break;
            }
        }
        return best;
    };
    auto phases_of = [](const PulseProfile &p) {
        std::vector<double> v;
        for (const auto &s : p.segments) {
            v.push_back(s.phase);
        }
        return v;
    };

    PulseProfile feasible = attempt(options.t_max, nullptr);
    if (!(feasible.residual < options.tol)) {
        throw IntegrityError("synthesize_pulse: no converged pulse at T=" + format_double(options.t_max) +
                             ", best residual " + format_double(feasible.residual));
    }
    double lo = options.t_min;
    double hi = options.t_max;
    while (hi - lo > options.t_resolution) {
        const double mid = 0.5 * (lo + hi);
        const auto warm = phases_of(feasible);
        PulseProfile p = attempt(mid, &warm);
        if (p.residual < options.tol) {
            feasible = p;
            hi = mid;
        } else {
            lo = mid;
        }
    }
    feasible.validate();
    return feasible;
}

std::string pulse_csv(const PulseProfile &profile) {
    std::ostringstream out;
    out << "t,phase_rad\n";
    double t = 0;
    for (const auto &s : profile.segments) {
        out << format_double(t) << ',' << format_double(s.phase) << '\n';
        t += s.duration;
    }
    if (!profile.segments.empty()) {
        out << format_double(t) << ',' << format_double(profile.segments.back().phase) << '\n';
    }
    return out.str();
}

std::filesystem::path pulse_sidecar_path(const std::filesystem::path &csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_pulse(const PulseProfile &profile, const std::filesystem::path &csv_path) {
    std::ofstream csv(csv_path);
    require(csv.good(), "write_pulse: cannot open " + csv_path.string());
    csv << pulse_csv(profile);
    nlohmann::ordered_json meta;
    meta["omega_max_units"] = "1.0";
    meta["total_time"] = profile.total_time();
    meta["theta"] = profile.theta;
    meta["residual"] = profile.residual;
    meta["n_segments"] = profile.segments.size();
    std::ofstream side(pulse_sidecar_path(csv_path));
    side << meta.dump(2) << '\n';
}

PulseProfile read_pulse(const std::filesystem::path &csv_path) {
    std::ifstream csv(csv_path);
    require(csv.good(), "read_pulse: cannot open " + csv_path.string());
    std::string line;
    std::getline(csv, line);
    require(line == "t,phase_rad", "read_pulse: unexpected header '" + line + "'");
    std::vector<std::pair<double, double>> rows;
    while (std::getline(csv, line)) {
        if (line.empty()) {
            continue;
        }
        auto comma = line.find(',');
        require(comma != std::string::npos, "read_pulse: malformed row '" + line + "'");
        try {
            rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::logic_error &) {
            throw ValidationError("read_pulse: malformed row '" + line + "'");
        }
        require(rows.size() < 2 || rows.back().first > rows[rows.size() - 2].first,
                "read_pulse: times must increase");
    }
    require(rows.size() >= 2, "read_pulse: need at least one segment");
    PulseProfile p;
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        p.segments.push_back({rows[i + 1].first - rows[i].first, rows[i].second});
    }
    auto side_path = pulse_sidecar_path(csv_path);
    std::ifstream side(side_path);
    require(side.good(), "read_pulse: missing sidecar " + side_path.string());
    try {
        auto meta = nlohmann::json::parse(side);
        p.theta = meta.at("theta").get<double>();
        p.residual = meta.at("residual").get<double>();
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("read_pulse: bad sidecar " + side_path.string() + ": " + e.what());
    }
    p.validate();
    return p;
}

}  // namespace rydqec
