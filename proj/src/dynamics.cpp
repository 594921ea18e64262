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

#include "rydqec/dynamics.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace {

int ipow3(int k) {
    int r = 1;
    while (k-- > 0) {
        r *= 3;
    }
    return r;
}

CMat ket_bra(int dim, int i, int j, double amp = 1.0) {
    CMat m = CMat::Zero(dim, dim);
    m(i, j) = amp;
    return m;
}

// Amplitude damping from |r> with total probability p, branching equally to |0> and |1>.
std::vector<CMat> damping_kraus(double p) {
    CMat k0 = CMat::Identity(3, 3);
    k0(2, 2) = std::sqrt(1.0 - p);
    return {k0, ket_bra(3, 0, 2, std::sqrt(p / 2)), ket_bra(3, 1, 2, std::sqrt(p / 2))};
}

CMat pair_product_superop(const std::vector<CMat> &kraus) {
    std::vector<CMat> pair;
    for (const auto &a : kraus) {
        for (const auto &b : kraus) {
            pair.push_back(kron(a, b));
        }
    }
    return kraus_to_superop(pair);
}

CMat matrix_power(CMat base, int exponent) {
    CMat result = CMat::Identity(base.rows(), base.cols());
    while (exponent > 0) {
        if (exponent & 1) {
            result = result * base;
        }
        exponent >>= 1;
        if (exponent > 0) {
            base = base * base;
        }
    }
    return result;
}

// Digit of `atom` in a basis index of n qutrits, atom 0 most significant.
struct Layout {
    std::vector<int> local;
    std::vector<int> rest;
    std::vector<int> full;  // full[local * n_rest + rest]
    int n_local;
    int n_rest;
};

Layout stage_layout(const std::vector<int> &active, int n_atoms) {
    const int dim = ipow3(n_atoms);
    Layout lay;
    lay.n_local = ipow3(static_cast<int>(active.size()));
    lay.n_rest = dim / lay.n_local;
    lay.local.resize(dim);
    lay.rest.resize(dim);
    lay.full.resize(dim);
    for (int x = 0; x < dim; ++x) {
        int loc = 0;
        int rest = 0;
        for (int a = 0; a < n_atoms; ++a) {
            const int digit = (x / ipow3(n_atoms - 1 - a)) % 3;
            bool is_active = false;
            for (int t : active) {
                is_active |= (t == a);
            }
            if (!is_active) {
                rest = rest * 3 + digit;
            }
        }
        for (int t : active) {
            loc = loc * 3 + (x / ipow3(n_atoms - 1 - t)) % 3;
        }
        lay.local[x] = loc;
        lay.rest[x] = rest;
        lay.full[loc * lay.n_rest + rest] = x;
    }
    return lay;
}

void check_stage(const QutritChannel &stage, int n_atoms) {
    require(stage.active.size() == 1 || stage.active.size() == 2, "QutritChannel: one or two active atoms");
    for (int a : stage.active) {
        require(a >= 0 && a < n_atoms, "QutritChannel: active atom out of range");
    }
    if (stage.active.size() == 2) {
        require(stage.active[0] != stage.active[1], "QutritChannel: repeated active atom");
    }
    const int l = stage.local_dim();
    require(stage.superop.rows() == l * l && stage.superop.cols() == l * l, "QutritChannel: superop shape");
}

const char *kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::AfterEveryGateBoth:
            return "AfterEveryGateBoth";
        case ScheduleKind::AncillaOnlyEveryGate:
            return "AncillaOnlyEveryGate";
        case ScheduleKind::DataOnlyEveryGate:
            return "DataOnlyEveryGate";
        case ScheduleKind::AncillaTwice:
            return "AncillaTwice";
        case ScheduleKind::AncillaHalfway:
            return "AncillaHalfway";
        case ScheduleKind::None:
            return "None";
    }
    return "?";
}

}  // namespace

void NoiseParams::validate() const {
    require(gamma >= 0 && std::isfinite(gamma), "NoiseParams: gamma must be >= 0");
    require(dt > 0 && std::isfinite(dt), "NoiseParams: dt must be > 0");
    require(gamma * dt < 0.01, "NoiseParams: gamma * dt must be < 0.01");
}

void IonizationSchedule::validate() const {
    require(p_depl >= 0 && p_depl <= 1, "IonizationSchedule: p_depl must lie in [0, 1]");
    if (kind != ScheduleKind::AfterEveryGateBoth && kind != ScheduleKind::None) {
        require(p_depl == 1.0, std::string("IonizationSchedule: ") + kind_name(kind) + " requires p_depl = 1");
    }
}

std::string IonizationSchedule::label() const {
    if (kind == ScheduleKind::AfterEveryGateBoth) {
        return std::string(kind_name(kind)) + "@" + format_double(p_depl);
    }
    return kind_name(kind);
}

IonizationSchedule IonizationSchedule::parse(const std::string &label) {
    const auto at = label.find('@');
    const std::string name = label.substr(0, at);
    IonizationSchedule s;
    bool found = false;
    for (auto kind : {ScheduleKind::AfterEveryGateBoth, ScheduleKind::AncillaOnlyEveryGate,
                      ScheduleKind::DataOnlyEveryGate, ScheduleKind::AncillaTwice, ScheduleKind::AncillaHalfway,
                      ScheduleKind::None}) {
        if (name == kind_name(kind)) {
            s.kind = kind;
            found = true;
        }
    }
    require(found, "unknown schedule '" + label + "'");
    if (at != std::string::npos) {
        require(s.kind == ScheduleKind::AfterEveryGateBoth, "schedule '" + name + "' takes no p_depl");
        size_t used = 0;
        try {
            s.p_depl = std::stod(label.substr(at + 1), &used);
        } catch (const std::exception &) {
            used = 0;
        }
        require(used > 0 && used == label.size() - at - 1, "bad p_depl in schedule '" + label + "'");
    }
    s.validate();
    return s;
}

std::vector<int> IonizationSchedule::ionized_after_gate(int k, int data_atom) const {
    switch (kind) {
        case ScheduleKind::AfterEveryGateBoth:
            return {0, data_atom};
        case ScheduleKind::AncillaOnlyEveryGate:
            return {0};
        case ScheduleKind::DataOnlyEveryGate:
            return {data_atom};
        case ScheduleKind::AncillaTwice:
            return (k == 0 || k == 2) ? std::vector<int>{0} : std::vector<int>{};
        case ScheduleKind::AncillaHalfway:
            return k == 1 ? std::vector<int>{0} : std::vector<int>{};
        case ScheduleKind::None:
            return {};
    }
    return {};
}

std::vector<IonizationSchedule> selected_location_schedules() {
    return {{ScheduleKind::AfterEveryGateBoth, 1.0}, {ScheduleKind::AncillaOnlyEveryGate, 1.0},
            {ScheduleKind::AncillaTwice, 1.0},       {ScheduleKind::AncillaHalfway, 1.0},
            {ScheduleKind::DataOnlyEveryGate, 1.0},  {ScheduleKind::None, 1.0}};
}

int QutritChannel::local_dim() const {
    return ipow3(static_cast<int>(active.size()));
}

QutritChannel gate_channel(const PulseProfile &profile, const NoiseParams &noise, int atom_a, int atom_b) {
    noise.validate();
    profile.validate();
    require(atom_a != atom_b, "gate_channel: atoms must differ");
    CMat total = CMat::Identity(81, 81);
    for (const auto &seg : profile.segments) {
        const int steps = std::max(1, static_cast<int>(std::ceil(seg.duration / noise.dt - 1e-9)));
        const double h = seg.duration / steps;
        const CMat coherent = unitary_superop(pair_step_unitary(h, seg.phase));
        CMat slice = coherent;
        if (noise.gamma > 0) {
            // Symmetric splitting: half-step damping on both atoms around the exact coherent step.
            const CMat half = pair_product_superop(damping_kraus(-std::expm1(-noise.gamma * h / 2)));
            slice = half * coherent * half;
        }
        total = matrix_power(slice, steps) * total;
    }
    return {{atom_a, atom_b}, total};
}

QutritChannel idle_decay_channel(double duration, double gamma, int atom) {
    require(duration >= 0 && gamma >= 0, "idle_decay_channel: duration and gamma must be >= 0");
    const auto kraus = damping_kraus(-std::expm1(-gamma * duration));
    return {{atom}, kraus_to_superop(kraus)};
}

QutritChannel ionization_channel(double p_depl, int atom) {
    require(p_depl >= 0 && p_depl <= 1, "ionization_channel: p_depl must lie in [0, 1]");
    CMat k0 = CMat::Identity(3, 3);
    k0(2, 2) = std::sqrt(1.0 - p_depl);
    const std::vector<CMat> kraus{k0, ket_bra(3, 0, 2, std::sqrt(p_depl))};
    return {{atom}, kraus_to_superop(kraus)};
}

QutritChannel terminal_projection(int atom) {
    CMat pi = CMat::Identity(3, 3);
    pi(2, 2) = 0;
    const std::vector<CMat> kraus{pi, ket_bra(3, 0, 2, std::sqrt(0.5)), ket_bra(3, 1, 2, std::sqrt(0.5))};
    return {{atom}, kraus_to_superop(kraus)};
}

QutritChannel rz_channel(double angle, int atom) {
    CMat u = CMat::Identity(3, 3);
    u(1, 1) = std::polar(1.0, angle);
    return {{atom}, unitary_superop(u)};
}

PlaquetteChannel compose_plaquette(const PulseProfile &profile, const NoiseParams &noise,
                                   const IonizationSchedule &schedule, std::array<int, 4> data_order) {
    return compose_plaquette(gate_channel(profile, noise), profile, noise, schedule, data_order);
}

PlaquetteChannel compose_plaquette(const QutritChannel &gate01, const PulseProfile &profile,
                                   const NoiseParams &noise, const IonizationSchedule &schedule,
                                   std::array<int, 4> data_order) {
    noise.validate();
    schedule.validate();
    require(gate01.superop.rows() == 81, "compose_plaquette: gate channel must act on two qutrits");
    std::array<bool, kPlaquetteAtoms> seen{};
    for (int a : data_order) {
        require(a >= 1 && a < kPlaquetteAtoms && !seen[a], "compose_plaquette: data_order must permute 1..4");
        seen[a] = true;
    }
    const double gate_time = profile.total_time();
    const double strength = schedule.kind == ScheduleKind::AfterEveryGateBoth ? schedule.p_depl : 1.0;

    PlaquetteChannel out;
    out.schedule = schedule;
    out.noise = noise;
    out.pulse_id = profile.id();
    out.theta = profile.theta;
    const QutritChannel idle = idle_decay_channel(gate_time, noise.gamma);
    const QutritChannel ionize = ionization_channel(strength);
    for (int k = 0; k < 4; ++k) {
        const int data = data_order[k];
        out.stages.push_back({{0, data}, gate01.superop});
        for (int a = 1; a < kPlaquetteAtoms; ++a) {
            if (a != data && noise.gamma > 0) {
                out.stages.push_back({{a}, idle.superop});
            }
        }
        for (int a : schedule.ionized_after_gate(k, data)) {
            out.stages.push_back({{a}, ionize.superop});
        }
    }
    out.stages.push_back(rz_channel(-4 * profile.theta, 0));
    for (int a = 1; a < kPlaquetteAtoms; ++a) {
        out.stages.push_back(rz_channel(-profile.theta, a));
    }
    for (int a = 0; a < kPlaquetteAtoms; ++a) {
        out.stages.push_back(terminal_projection(a));
    }
    return out;
}

CMat PlaquetteChannel::apply(const CMat &rho) const {
    CMat r = rho;
    for (const auto &s : stages) {
        r = apply_stage(s, r);
    }
    return r;
}

CMat apply_stage(const QutritChannel &stage, const CMat &rho, int n_atoms) {
    check_stage(stage, n_atoms);
    const int dim = ipow3(n_atoms);
    require(rho.rows() == dim && rho.cols() == dim, "apply_stage: operator dimension mismatch");
    const Layout lay = stage_layout(stage.active, n_atoms);
    const int l = lay.n_local;
    const int r = lay.n_rest;
    CMat gathered(l * l, r * r);
    for (int li = 0; li < l; ++li) {
        for (int lj = 0; lj < l; ++lj) {
            for (int ri = 0; ri < r; ++ri) {
                const int x = lay.full[li * r + ri];
                for (int rj = 0; rj < r; ++rj) {
                    gathered(li * l + lj, ri * r + rj) = rho(x, lay.full[lj * r + rj]);
                }
            }
        }
    }
    const CMat mapped = stage.superop * gathered;
    CMat out(dim, dim);
    for (int li = 0; li < l; ++li) {
        for (int lj = 0; lj < l; ++lj) {
            for (int ri = 0; ri < r; ++ri) {
                const int x = lay.full[li * r + ri];
                for (int rj = 0; rj < r; ++rj) {
                    out(x, lay.full[lj * r + rj]) = mapped(li * l + lj, ri * r + rj);
                }
            }
        }
    }
    return out;
}

CMat apply_stage_dense(const QutritChannel &stage, const CMat &rho, int n_atoms) {
    check_stage(stage, n_atoms);
    const int dim = ipow3(n_atoms);
    const Layout lay = stage_layout(stage.active, n_atoms);
    CMat out = CMat::Zero(dim, dim);
    for (const auto &k : superop_to_kraus(stage.superop, stage.local_dim(), 0.0)) {
        CMat big = CMat::Zero(dim, dim);
        for (int x = 0; x < dim; ++x) {
            for (int y = 0; y < dim; ++y) {
                if (lay.rest[x] == lay.rest[y]) {
                    big(x, y) = k(lay.local[x], lay.local[y]);
                }
            }
        }
        out += big * rho * big.adjoint();
    }
    return out;
}

ProductContraction::ProductContraction(const PlaquetteChannel &channel) {
    std::array<int, kPlaquetteAtoms> gate_index;
    gate_index.fill(-1);
    for (size_t i = 0; i < channel.stages.size(); ++i) {
        const auto &s = channel.stages[i];
        check_stage(s, kPlaquetteAtoms);
        if (s.active.size() == 2) {
            require(s.active[0] == 0, "ProductContraction: two-atom stages must act on (ancilla, data)");
            require(gate_index[s.active[1]] < 0, "ProductContraction: data atom in more than one gate");
            gate_index[s.active[1]] = static_cast<int>(i);
        }
    }
    for (int a = 0; a < kPlaquetteAtoms; ++a) {
        pre_[a] = CMat::Identity(9, 9);
        post_[a] = CMat::Identity(9, 9);
        gated_[a] = gate_index[a] >= 0;
    }
    for (size_t i = 0; i < channel.stages.size(); ++i) {
        const auto &s = channel.stages[i];
        if (s.active.size() == 2) {
            ancilla_steps_.push_back({s.active[1], &s.superop});
            continue;
        }
        const int a = s.active[0];
        if (a == 0) {
            ancilla_steps_.push_back({-1, &s.superop});
        } else if (gated_[a] && static_cast<int>(i) > gate_index[a]) {
            post_[a] = s.superop * post_[a];
        } else {
            pre_[a] = s.superop * pre_[a];
        }
    }
}

cplx ProductContraction::evaluate(const std::array<Mat3, kPlaquetteAtoms> &in,
                                  const std::array<Mat3, kPlaquetteAtoms> &out) const {
    std::array<CVec, kPlaquetteAtoms> functional;
    std::array<CVec, kPlaquetteAtoms> prepared;
    for (int a = 0; a < kPlaquetteAtoms; ++a) {
        const CVec o = vec(out[a].transpose());
        functional[a] = post_[a].transpose() * o;
        prepared[a] = pre_[a] * vec(in[a]);
    }
    cplx result = 1.0;
    for (int a = 1; a < kPlaquetteAtoms; ++a) {
        if (!gated_[a]) {
            result *= functional[a].cwiseProduct(prepared[a]).sum();
        }
    }
    CVec v = prepared[0];
    CVec joint(81);
    for (const auto &step : ancilla_steps_) {
        if (step.gate_atom < 0) {
            v = *step.superop * v;
            continue;
        }
        const CVec &u = prepared[step.gate_atom];
        const CVec &f = functional[step.gate_atom];
        for (int ai = 0; ai < 3; ++ai) {
            for (int di = 0; di < 3; ++di) {
                for (int aj = 0; aj < 3; ++aj) {
                    for (int dj = 0; dj < 3; ++dj) {
                        joint[(ai * 3 + di) * 9 + aj * 3 + dj] = v[ai * 3 + aj] * u[di * 3 + dj];
                    }
                }
            }
        }
        const CVec w = *step.superop * joint;
        CVec next = CVec::Zero(9);
        for (int ai = 0; ai < 3; ++ai) {
            for (int aj = 0; aj < 3; ++aj) {
                cplx acc = 0;
                for (int di = 0; di < 3; ++di) {
                    for (int dj = 0; dj < 3; ++dj) {
                        acc += w[(ai * 3 + di) * 9 + aj * 3 + dj] * f[di * 3 + dj];
                    }
                }
                next[ai * 3 + aj] = acc;
            }
        }
        v = next;
    }
    return result * functional[0].cwiseProduct(v).sum();
}

void save_channel(const PlaquetteChannel &channel, const std::filesystem::path &path) {
    nlohmann::ordered_json meta;
    meta["format"] = "rydqec-plaquette-channel";
    meta["version"] = 1;
    meta["schedule"] = channel.schedule.label();
    meta["gamma"] = channel.noise.gamma;
    meta["dt"] = channel.noise.dt;
    meta["pulse_id"] = channel.pulse_id;
    meta["theta"] = channel.theta;
    meta["n_stages"] = channel.stages.size();
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "save_channel: cannot open " + path.string());
    out << meta.dump() << '\n';
    for (const auto &s : channel.stages) {
        const auto n = static_cast<std::int32_t>(s.active.size());
        out.write(reinterpret_cast<const char *>(&n), sizeof n);
        for (int a : s.active) {
            const auto a32 = static_cast<std::int32_t>(a);
            out.write(reinterpret_cast<const char *>(&a32), sizeof a32);
        }
        for (Eigen::Index i = 0; i < s.superop.rows(); ++i) {
            for (Eigen::Index j = 0; j < s.superop.cols(); ++j) {
                const double re_im[2] = {s.superop(i, j).real(), s.superop(i, j).imag()};
                out.write(reinterpret_cast<const char *>(re_im), sizeof re_im);
            }
        }
    }
}

PlaquetteChannel load_channel(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "load_channel: cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception &) {
        throw ValidationError("load_channel: malformed header in " + path.string());
    }
    require(meta.value("format", "") == "rydqec-plaquette-channel" && meta.value("version", 0) == 1,
            "load_channel: unsupported channel file " + path.string());
    PlaquetteChannel ch;
    ch.schedule = IonizationSchedule::parse(meta.at("schedule").get<std::string>());
    ch.noise.gamma = meta.at("gamma").get<double>();
    ch.noise.dt = meta.at("dt").get<double>();
    ch.pulse_id = meta.at("pulse_id").get<std::string>();
    ch.theta = meta.at("theta").get<double>();
    const auto n_stages = meta.at("n_stages").get<size_t>();
    for (size_t k = 0; k < n_stages; ++k) {
        std::int32_t n = 0;
        in.read(reinterpret_cast<char *>(&n), sizeof n);
        require(in.good() && (n == 1 || n == 2), "load_channel: truncated or corrupt stage");
        QutritChannel s;
        for (int t = 0; t < n; ++t) {
            std::int32_t a = 0;
            in.read(reinterpret_cast<char *>(&a), sizeof a);
            s.active.push_back(a);
        }
        const int l = s.local_dim();
        s.superop.resize(l * l, l * l);
        for (int i = 0; i < l * l; ++i) {
            for (int j = 0; j < l * l; ++j) {
                double re_im[2];
                in.read(reinterpret_cast<char *>(re_im), sizeof re_im);
                s.superop(i, j) = cplx(re_im[0], re_im[1]);
            }
        }
        require(in.good(), "load_channel: truncated stage data");
        check_stage(s, kPlaquetteAtoms);
        ch.stages.push_back(std::move(s));
    }
    return ch;
}

}  // namespace rydqec
