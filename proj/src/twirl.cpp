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

#include "rydqec/twirl.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace {

std::array<Mat3, kPlaquetteAtoms> qutrit_factors(const PauliString &p) {
    std::array<Mat3, kPlaquetteAtoms> f;
    for (int q = 0; q < kPlaquetteAtoms; ++q) {
        f[q] = pauli_qutrit(p[q]);
    }
    return f;
}

int qubit_to_qutrit_index(int x) {
    int out = 0;
    for (int q = 0; q < kPlaquetteAtoms; ++q) {
        out = out * 3 + ((x >> (kPlaquetteAtoms - 1 - q)) & 1);
    }
    return out;
}

CMat cz4_diagonal() {
    CMat u = CMat::Identity(32, 32);
    for (int x = 0; x < 32; ++x) {
        const int anc = (x >> 4) & 1;
        int parity = 0;
        for (int q = 1; q < kPlaquetteAtoms; ++q) {
            parity ^= anc & ((x >> (kPlaquetteAtoms - 1 - q)) & 1);
        }
        u(x, x) = parity ? -1.0 : 1.0;
    }
    return u;
}

}  // namespace

ErrorChannel::ErrorChannel(const PlaquetteChannel &plaquette, const PulseProfile &profile)
    : plaquette_(&plaquette), contraction_(plaquette) {
    require(plaquette.pulse_id == profile.id(), "error_channel: plaquette was built for pulse " + plaquette.pulse_id +
                                                    ", got " + profile.id());
}

cplx ErrorChannel::pauli_element(const PauliString &p, const PauliString &q) const {
    const SignedPauli pre = conjugate_by_cz4(q);
    return static_cast<double>(pre.sign) * contraction_.evaluate(qutrit_factors(pre.pauli), qutrit_factors(p));
}

CMat ErrorChannel::apply(const CMat &sigma) const {
    require(sigma.rows() == 32 && sigma.cols() == 32, "ErrorChannel::apply: expects a 32x32 operator");
    const CMat u = cz4_diagonal();
    const CMat pre = u * sigma * u;
    CMat big = CMat::Zero(kPlaquetteDim, kPlaquetteDim);
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            big(qubit_to_qutrit_index(i), qubit_to_qutrit_index(j)) = pre(i, j);
        }
    }
    const CMat mapped = plaquette_->apply(big);
    CMat out(32, 32);
    for (int i = 0; i < 32; ++i) {
        for (int j = 0; j < 32; ++j) {
            out(i, j) = mapped(qubit_to_qutrit_index(i), qubit_to_qutrit_index(j));
        }
    }
    return out;
}

std::vector<double> ptm_diagonal(const PauliElement &element) {
    std::vector<double> r(kPauliCount);
    for (int k = 0; k < kPauliCount; ++k) {
        const auto p = PauliString::from_index(k);
        r[k] = element(p, p).real() / 32.0;
    }
    return r;
}

std::vector<double> ptm_diagonal(const ErrorChannel &channel) {
    return ptm_diagonal([&](const PauliString &p, const PauliString &q) { return channel.pauli_element(p, q); });
}

double PauliChannel::total() const {
    double s = 0;
    for (double x : probs) {
        s += x;
    }
    return s;
}

void PauliChannel::validate() const {
    require(probs.size() == kPauliCount, "PauliChannel: expected 1024 probabilities");
    for (double x : probs) {
        require(std::isfinite(x) && x >= 0, "PauliChannel: probabilities must be finite and >= 0");
    }
    require(std::abs(total() - 1.0) < 1e-9, "PauliChannel: probabilities must sum to 1");
}

PauliChannel twirl(const std::vector<double> &ptm_diag) {
    require(ptm_diag.size() == kPauliCount, "twirl: expected 1024 PTM entries");
    PauliChannel out;
    std::vector<PauliString> strings;
    strings.reserve(kPauliCount);
    for (int k = 0; k < kPauliCount; ++k) {
        strings.push_back(PauliString::from_index(k));
    }
    double sum = 0;
    for (int qi = 0; qi < kPauliCount; ++qi) {
        double acc = 0;
        for (int pi = 0; pi < kPauliCount; ++pi) {
            acc += strings[pi].commutes(strings[qi]) ? ptm_diag[pi] : -ptm_diag[pi];
        }
        out.probs[qi] = acc / kPauliCount;
        sum += out.probs[qi];
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw IntegrityError("twirl: probabilities sum to " + format_double(sum));
    }
    double clamped_sum = 0;
    for (auto &x : out.probs) {
        if (x < 0) {
            if (x < -1e-10) {
                throw IntegrityError("twirl: negative probability " + format_double(x));
            }
            x = 0;
        }
        clamped_sum += x;
    }
    for (auto &x : out.probs) {
        x /= clamped_sum;
    }
    return out;
}

PauliChannel extract_pauli_channel(const PlaquetteChannel &plaquette, const PulseProfile &profile) {
    ErrorChannel err(plaquette, profile);
    PauliChannel ch = twirl(ptm_diagonal(err));
    ch.gamma = plaquette.noise.gamma;
    ch.schedule = plaquette.schedule;
    ch.basis = StabilizerType::Z;
    return ch;
}

PauliChannel to_x_plaquette_frame(const PauliChannel &cz_frame) {
    require(cz_frame.basis == StabilizerType::Z, "to_x_plaquette_frame: input must be in the CZ frame");
    PauliChannel out = cz_frame;
    out.basis = StabilizerType::X;
    for (int k = 0; k < kPauliCount; ++k) {
        out.probs[hadamard_data(PauliString::from_index(k)).index()] = cz_frame.probs[k];
    }
    return out;
}

void write_pauli_channel(const PauliChannel &channel, const std::filesystem::path &path) {
    nlohmann::ordered_json j;
    j["schema"] = "rydqec-pauli-channel/1";
    j["gamma"] = channel.gamma;
    j["schedule"] = channel.schedule.label();
    j["p_depl"] = channel.schedule.p_depl;
    j["basis"] = std::string(1, stabilizer_char(channel.basis));
    nlohmann::ordered_json probs = nlohmann::ordered_json::object();
    for (int k = 0; k < kPauliCount; ++k) {
        probs[PauliString::from_index(k).label()] = channel.probs[k];
    }
    j["probs"] = probs;
    std::ofstream out(path);
    require(out.good(), "write_pauli_channel: cannot open " + path.string());
    out << j.dump(1) << '\n';
}

PauliChannel read_pauli_channel(const std::filesystem::path &path) {
    std::ifstream in(path);
    require(in.good(), "read_pauli_channel: cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("read_pauli_channel: " + std::string(e.what()));
    }
    require(j.value("schema", "") == "rydqec-pauli-channel/1", "read_pauli_channel: unknown schema");
    PauliChannel ch;
    ch.gamma = j.at("gamma").get<double>();
    ch.schedule = IonizationSchedule::parse(j.at("schedule").get<std::string>());
    ch.basis = parse_stabilizer_type(j.value("basis", "Z"));
    const auto &probs = j.at("probs");
    require(probs.size() == kPauliCount, "read_pauli_channel: expected 1024 probabilities");
    for (auto it = probs.begin(); it != probs.end(); ++it) {
        ch.probs[PauliString::from_label(it.key()).index()] = it.value().get<double>();
    }
    ch.validate();
    return ch;
}

}  // namespace rydqec
