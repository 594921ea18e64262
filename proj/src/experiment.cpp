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

#include "rydqec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rydqec/errors.hpp"
#include "rydqec/hashing.hpp"

namespace rydqec {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char *kChannelKeyVersion = "rydqec-channel-key/1";

template <typename F>
auto in_stage(const std::string &stage, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const IntegrityError &e) {
        throw IntegrityError(stage + ": " + e.what());
    } catch (const ValidationError &e) {
        throw ValidationError(stage + ": " + e.what());
    }
}

std::string kind_of(const IonizationSchedule &s) {
    const std::string label = s.label();
    return label.substr(0, label.find('@'));
}

double csv_p_depl(const IonizationSchedule &s) {
    return s.kind == ScheduleKind::None ? 0.0 : s.p_depl;
}

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_double(const std::string &s, const std::string &what) {
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    require(used > 0 && used == s.size(), "bad number '" + s + "' for " + what);
    return v;
}

std::uint64_t parse_u64(const std::string &s, const std::string &what) {
    size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    require(used > 0 && used == s.size(), "bad integer '" + s + "' for " + what);
    return v;
}

void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed, const std::string &where) {
    require(j.is_object(), where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        require(allowed.count(it.key()) > 0, "unknown key '" + it.key() + "' in " + where);
    }
}

std::vector<double> parse_grid(const nlohmann::json &j, const std::string &where) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto &v : j) {
            require(v.is_number(), where + " entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    check_keys(j, {"lo", "hi", "n"}, where);
    require(j.contains("lo") && j.contains("hi") && j.contains("n"), where + " needs lo, hi and n");
    return log_grid(j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("n").get<int>());
}

template <typename T>
void read_opt(const nlohmann::json &j, const char *key, T &out) {
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const nlohmann::json::exception &e) {
            throw ValidationError(std::string("config key '") + key + "': " + e.what());
        }
    }
}

ojson manifest_of(const fs::path &dir) {
    const fs::path p = dir / "manifest.json";
    if (!fs::exists(p)) {
        return ojson{{"schema", kManifestSchema}, {"runs", ojson::object()}};
    }
    try {
        return ojson::parse(read_file(p));
    } catch (const nlohmann::json::exception &e) {
        throw IntegrityError("manifest.json is not valid JSON: " + std::string(e.what()));
    }
}

std::string without_workers(const std::string &config_json) {
    auto j = ojson::parse(config_json);
    j.erase("workers");
    return j.dump();
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
    require(lo > 0 && hi >= lo && n >= 1, "log_grid: need 0 < lo <= hi and n >= 1");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return out;
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << content;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
    require(dt > 0, "dt must be positive");
    for (const auto *grid : {&mc_gammas, &nu_gammas, &fit_gammas}) {
        for (double g : *grid) {
            NoiseParams{g, dt}.validate();
            require(g > 0, "gamma grid entries must be positive");
        }
    }
    require(!mc_gammas.empty(), "mc gamma grid is empty");
    require(fit_gammas.size() >= 3, "channel fits need at least 3 gamma points");
    NoiseParams{reference_gamma, dt}.validate();
    require(reference_gamma > 0, "reference gamma must be positive");
    require(!distances.empty(), "no distances");
    for (int d : distances) {
        require(d >= 3 && d % 2 == 1, "distances must be odd and >= 3");
        require(d <= 5 || large, "distance " + std::to_string(d) + " requires large = true");
    }
    for (double p : p_depl) {
        require(p >= 0 && p <= 1, "p_depl entries must lie in [0, 1]");
    }
    require(shots.max_shots >= 1 && shots.chunk >= 1, "shot cap and chunk must be >= 1");
    require(shots.target_rel_halfwidth >= 0, "target_rel_halfwidth must be >= 0");
    require(workers >= 1, "workers must be >= 1");
    require(p_floor >= 0 && p_floor < 1e-3, "p_floor must lie in [0, 1e-3)");
    require(decoder_cap >= 2 && decoder_cap <= 24, "decoder_cap must lie in [2, 24]");
    require(nu_window.min_points >= 3, "nu window needs at least 3 points");
    require(nu_window.max_points >= nu_window.min_points, "nu window max_points < min_points");
    require(nu_window.max_rel_halfwidth > 0, "nu window half-width must be positive");
    require(!output_dir.empty(), "output_dir is empty");
}

fs::path ExperimentConfig::resolved_cache_dir() const {
    return cache_dir.empty() ? output_dir / "cache" : cache_dir;
}

std::vector<double> ExperimentConfig::sample_gammas() const {
    std::vector<double> all = mc_gammas;
    all.insert(all.end(), nu_gammas.begin(), nu_gammas.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

std::string ExperimentConfig::to_json() const {
    ojson j;
    j["schema"] = kConfigSchema;
    if (!pulse_file.empty()) {
        j["pulse"] = {{"file", pulse_file.string()}};
    } else {
        j["pulse"] = {{"synth",
                       {{"n_segments", synth.n_segments},
                        {"tol", synth.tol},
                        {"seed", synth.seed},
                        {"random_starts", synth.random_starts},
                        {"t_min", synth.t_min},
                        {"t_max", synth.t_max},
                        {"t_resolution", synth.t_resolution},
                        {"max_iterations", synth.max_iterations}}}};
    }
    j["dt"] = dt;
    j["gammas"] = {{"mc", mc_gammas}, {"nu", nu_gammas}, {"fit", fit_gammas}, {"reference", reference_gamma}};
    j["distances"] = distances;
    j["p_depl"] = p_depl;
    j["memory_basis"] = std::string(1, stabilizer_char(memory_basis));
    j["scheduling"] = scheduling == BasisScheduling::Sequential ? "sequential" : "interleaved";
    j["shots"] = {{"max", shots.max_shots},
                  {"chunk", shots.chunk},
                  {"target_rel_halfwidth", shots.target_rel_halfwidth},
                  {"min_failures", shots.min_failures}};
    j["seed"] = seed;
    j["workers"] = workers;
    j["p_floor"] = p_floor;
    j["decoder_cap"] = decoder_cap;
    j["uniform_weights"] = uniform_weights;
    ojson window{{"max_rel_halfwidth", nu_window.max_rel_halfwidth},
                 {"gamma_max", nullptr},
                 {"max_points", nu_window.max_points},
                 {"min_points", nu_window.min_points}};
    if (std::isfinite(nu_window.gamma_max)) {
        window["gamma_max"] = nu_window.gamma_max;
    }
    j["nu_window"] = window;
    j["large"] = large;
    j["output_dir"] = output_dir.string();
    j["cache_dir"] = resolved_cache_dir().string();
    return j.dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string &text, const fs::path &base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j,
               {"schema", "pulse", "dt", "gammas", "distances", "p_depl", "memory_basis", "scheduling", "shots",
                "seed", "workers", "p_floor", "decoder_cap", "uniform_weights", "nu_window", "large",
                "output_dir", "cache_dir"},
               "config");
    require(j.value("schema", std::string(kConfigSchema)) == kConfigSchema,
            std::string("config schema must be ") + kConfigSchema);
    auto resolve = [&](const std::string &p) {
        fs::path path(p);
        return (path.is_relative() && !base_dir.empty() ? base_dir / path : path).lexically_normal();
    };
    ExperimentConfig c;
    if (j.contains("pulse")) {
        const auto &p = j["pulse"];
        check_keys(p, {"file", "synth"}, "pulse");
        require(p.contains("file") != p.contains("synth"), "pulse needs exactly one of file or synth");
        if (p.contains("file")) {
            c.pulse_file = resolve(p["file"].get<std::string>());
        } else {
            const auto &s = p["synth"];
            check_keys(s,
                       {"n_segments", "tol", "seed", "random_starts", "t_min", "t_max", "t_resolution",
                        "max_iterations"},
                       "pulse.synth");
            read_opt(s, "n_segments", c.synth.n_segments);
            read_opt(s, "tol", c.synth.tol);
            read_opt(s, "seed", c.synth.seed);
            read_opt(s, "random_starts", c.synth.random_starts);
            read_opt(s, "t_min", c.synth.t_min);
            read_opt(s, "t_max", c.synth.t_max);
            read_opt(s, "t_resolution", c.synth.t_resolution);
            read_opt(s, "max_iterations", c.synth.max_iterations);
        }
    }
    read_opt(j, "dt", c.dt);
    if (j.contains("gammas")) {
        const auto &g = j["gammas"];
        check_keys(g, {"mc", "nu", "fit", "reference"}, "gammas");
        if (g.contains("mc")) {
            c.mc_gammas = parse_grid(g["mc"], "gammas.mc");
        }
        if (g.contains("nu")) {
            c.nu_gammas = parse_grid(g["nu"], "gammas.nu");
        }
        if (g.contains("fit")) {
            c.fit_gammas = parse_grid(g["fit"], "gammas.fit");
        }
        read_opt(g, "reference", c.reference_gamma);
    }
    read_opt(j, "distances", c.distances);
    read_opt(j, "p_depl", c.p_depl);
    if (j.contains("memory_basis")) {
        c.memory_basis = parse_stabilizer_type(j["memory_basis"].get<std::string>());
    }
    if (j.contains("scheduling")) {
        const auto s = j["scheduling"].get<std::string>();
        require(s == "sequential" || s == "interleaved", "scheduling must be sequential or interleaved");
        c.scheduling = s == "sequential" ? BasisScheduling::Sequential : BasisScheduling::Interleaved;
    }
    if (j.contains("shots")) {
        const auto &s = j["shots"];
        check_keys(s, {"max", "chunk", "target_rel_halfwidth", "min_failures"}, "shots");
        if (s.contains("max")) {
            require(s["max"].is_number() && s["max"].get<double>() >= 1, "shots.max must be >= 1");
            c.shots.max_shots = static_cast<std::uint64_t>(s["max"].get<double>());
        }
        read_opt(s, "chunk", c.shots.chunk);
        read_opt(s, "target_rel_halfwidth", c.shots.target_rel_halfwidth);
        read_opt(s, "min_failures", c.shots.min_failures);
    }
    read_opt(j, "seed", c.seed);
    read_opt(j, "workers", c.workers);
    read_opt(j, "p_floor", c.p_floor);
    read_opt(j, "decoder_cap", c.decoder_cap);
    read_opt(j, "uniform_weights", c.uniform_weights);
    if (j.contains("nu_window")) {
        const auto &w = j["nu_window"];
        check_keys(w, {"max_rel_halfwidth", "gamma_max", "max_points", "min_points"}, "nu_window");
        read_opt(w, "max_rel_halfwidth", c.nu_window.max_rel_halfwidth);
        if (w.contains("gamma_max") && !w["gamma_max"].is_null()) {
            read_opt(w, "gamma_max", c.nu_window.gamma_max);
        }
        read_opt(w, "max_points", c.nu_window.max_points);
        read_opt(w, "min_points", c.nu_window.min_points);
    }
    read_opt(j, "large", c.large);
    if (j.contains("output_dir")) {
        c.output_dir = resolve(j["output_dir"].get<std::string>());
    }
    if (j.contains("cache_dir")) {
        c.cache_dir = resolve(j["cache_dir"].get<std::string>());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path &path) {
    return from_json(read_file(path), fs::absolute(path).parent_path());
}

// ---------------------------------------------------------------------------
// Channel cache

ChannelCache::ChannelCache(const PulseProfile &profile, double dt, fs::path dir)
    : profile_(profile), dt_(dt), dir_(std::move(dir)) {}

std::string ChannelCache::key(double gamma, const IonizationSchedule &schedule) const {
    return sha256_hex(std::string(kChannelKeyVersion) + "|" + profile_.id() + "|" + format_double(dt_) + "|" +
                      format_double(gamma) + "|" + schedule.label());
}

const PauliChannel &ChannelCache::get(double gamma, const IonizationSchedule &schedule) {
    const std::string k = key(gamma, schedule);
    if (auto it = memo_.find(k); it != memo_.end()) {
        return it->second;
    }
    const fs::path file = dir_.empty() ? fs::path{} : dir_ / (k + ".json");
    if (!file.empty() && fs::exists(file)) {
        PauliChannel ch = read_pauli_channel(file);
        if (ch.gamma != gamma || !(ch.schedule == schedule)) {
            throw IntegrityError("channel cache entry " + file.string() + " does not match its key");
        }
        return memo_.emplace(k, std::move(ch)).first->second;
    }
    const NoiseParams noise{gamma, dt_};
    auto g = gates_.find(gamma);
    if (g == gates_.end()) {
        g = gates_.emplace(gamma, gate_channel(profile_, noise)).first;
    }
    PauliChannel ch = extract_pauli_channel(compose_plaquette(g->second, profile_, noise, schedule), profile_);
    ++builds_;
    if (!file.empty()) {
        fs::create_directories(dir_);
        const fs::path tmp = file.string() + ".tmp";
        write_pauli_channel(ch, tmp);
        fs::rename(tmp, file);
    }
    return memo_.emplace(k, std::move(ch)).first->second;
}

// ---------------------------------------------------------------------------
// CSV schemas

std::string results_csv(const std::vector<LogicalRow> &rows) {
    std::string out = "d,gamma,schedule,p_depl,n_shots,p_L,ci_lo,ci_hi,seed\n";
    for (const auto &r : rows) {
        out += std::to_string(r.d) + "," + format_double(r.gamma) + "," + kind_of(r.schedule) + "," +
               format_double(csv_p_depl(r.schedule)) + "," + std::to_string(r.estimate.n_shots) + "," +
               format_double(r.estimate.p_L) + "," + format_double(r.estimate.ci.lo) + "," +
               format_double(r.estimate.ci.hi) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::vector<LogicalRow> read_results_csv(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && line == "d,gamma,schedule,p_depl,n_shots,p_L,ci_lo,ci_hi,seed",
            "results CSV header mismatch");
    std::vector<LogicalRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        require(f.size() == 9, "results CSV line " + std::to_string(lineno) + ": expected 9 fields");
        LogicalRow r;
        r.d = static_cast<int>(parse_u64(f[0], "d"));
        r.gamma = parse_double(f[1], "gamma");
        r.schedule = IonizationSchedule::parse(f[2]);
        if (r.schedule.kind == ScheduleKind::AfterEveryGateBoth) {
            r.schedule.p_depl = parse_double(f[3], "p_depl");
        }
        r.estimate.n_shots = parse_u64(f[4], "n_shots");
        r.estimate.p_L = parse_double(f[5], "p_L");
        r.estimate.ci = {parse_double(f[6], "ci_lo"), parse_double(f[7], "ci_hi")};
        r.estimate.failures = static_cast<std::uint64_t>(std::llround(r.estimate.p_L * r.estimate.n_shots));
        r.seed = parse_u64(f[8], "seed");
        rows.push_back(r);
    }
    return rows;
}

std::string nu_csv(const std::vector<NuFit> &fits) {
    std::string out = "d,schedule,nu,stderr,gamma_min,gamma_max\n";
    for (const auto &f : fits) {
        out += std::to_string(f.d) + "," + f.schedule + "," + format_double(f.nu) + "," + format_double(f.stderr_nu) +
               "," + format_double(f.gamma_min) + "," + format_double(f.gamma_max) + "\n";
    }
    return out;
}

std::vector<NuFit> fit_all(const std::vector<LogicalRow> &rows, const NuWindow &window) {
    std::vector<std::pair<int, std::string>> order;
    std::map<std::pair<int, std::string>, std::vector<LogicalPoint>> series;
    for (const auto &r : rows) {
        const auto key = std::make_pair(r.d, r.schedule.label());
        if (!series.count(key)) {
            order.push_back(key);
        }
        series[key].push_back({r.gamma, r.estimate.p_L, r.estimate.ci.lo, r.estimate.ci.hi, r.estimate.n_shots});
    }
    std::vector<NuFit> fits;
    for (const auto &key : order) {
        try {
            fits.push_back(fit_nu(series[key], key.first, key.second, window));
        } catch (const ValidationError &) {
            NuFit f;
            f.nu = f.stderr_nu = f.gamma_min = f.gamma_max = std::nan("");
            f.d = key.first;
            f.schedule = key.second;
            fits.push_back(f);
        }
    }
    return fits;
}

std::string census_csv(const std::vector<ScheduleCensus> &censuses) {
    std::string out = "schedule,basis,pauli,n,A,B,lambda_at_ref\n";
    for (const auto &c : censuses) {
        for (const auto &h : c.hooks) {
            out += c.schedule.label() + "," + stabilizer_char(h.basis) + "," + h.pauli.label() + "," +
                   std::to_string(h.fit.n) + "," + format_double(h.fit.A) + "," + format_double(h.fit.B) + "," +
                   format_double(h.amplitude_at_ref) + "\n";
        }
    }
    return out;
}

std::string hook_counts_csv(const std::vector<ScheduleCensus> &censuses) {
    std::string out = "schedule,p_depl,basis,count\n";
    for (const auto &c : censuses) {
        for (auto basis : {StabilizerType::X, StabilizerType::Z}) {
            out += kind_of(c.schedule) + "," + format_double(csv_p_depl(c.schedule)) + "," + stabilizer_char(basis) +
                   "," + std::to_string(c.count(basis)) + "\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

std::uint64_t cell_seed(std::uint64_t seed, int d, double gamma, const IonizationSchedule &schedule) {
    const std::string h = sha256_hex("cell|" + std::to_string(seed) + "|" + std::to_string(d) + "|" +
                                     format_double(gamma) + "|" + schedule.label());
    return std::stoull(h.substr(0, 15), nullptr, 16);
}

LogicalRow run_cell(ChannelCache &cache, const ExperimentConfig &config, int d, double gamma,
                    const IonizationSchedule &schedule) {
    const std::string where =
        "d=" + std::to_string(d) + " gamma=" + format_double(gamma) + " schedule=" + schedule.label();
    const PauliChannel &channel = in_stage(where + " channel", [&]() -> const PauliChannel & {
        return cache.get(gamma, schedule);
    });
    const Layout layout = build_layout(d);
    CircuitOptions opts;
    opts.memory_basis = config.memory_basis;
    opts.scheduling = config.scheduling;
    const CircuitIR circuit = in_stage(where + " circuit", [&] { return build_circuit(layout, opts); });
    const FaultPropagator propagator(circuit);
    const auto dem = in_stage(where + " dem",
                              [&] { return enumerate_faults(circuit, propagator, channel, config.p_floor); });
    GraphOptions gopts;
    gopts.uniform_weights = config.uniform_weights;
    const auto graph =
        in_stage(where + " graph", [&] { return MatchingGraph::build(dem, circuit, config.memory_basis, gopts); });
    const Decoder decoder(graph, config.decoder_cap);
    const Sampler sampler(propagator, channel);
    LogicalRow row{d, gamma, schedule, {}, cell_seed(config.seed, d, gamma, schedule)};
    row.estimate = in_stage(where + " sample", [&] {
        return estimate_logical(sampler, decoder, row.seed, config.shots, config.workers);
    });
    return row;
}

std::vector<IonizationSchedule> figure1c_schedules(const ExperimentConfig &config) {
    std::vector<IonizationSchedule> out;
    for (double p : config.p_depl) {
        out.push_back({ScheduleKind::AfterEveryGateBoth, p});
    }
    return out;
}

std::vector<IonizationSchedule> figure2_schedules() {
    std::vector<IonizationSchedule> out;
    for (double p : {1.0, 0.9, 0.75, 0.5, 0.0}) {
        out.push_back({ScheduleKind::AfterEveryGateBoth, p});
    }
    for (const auto &s : selected_location_schedules()) {
        if (s.kind != ScheduleKind::AfterEveryGateBoth) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<std::string> figure_names() {
    return {"fig1c", "figS3", "fig2"};
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
    config_.validate();
}

const PulseProfile &Experiment::pulse() {
    if (!pulse_) {
        PulseProfile p = config_.pulse_file.empty() ? synthesize_pulse(GateModel{}, config_.synth)
                                                    : read_pulse(config_.pulse_file);
        p.validate();
        const auto check = verify_cz_algebra(propagate_restricted(p));
        if (check.residual > 1e-6) {
            throw IntegrityError("pulse: CZ algebra residual " + format_double(check.residual) + " exceeds 1e-6");
        }
        pulse_ = std::make_unique<PulseProfile>(std::move(p));
    }
    return *pulse_;
}

ChannelCache &Experiment::cache() {
    if (!cache_) {
        cache_ = std::make_unique<ChannelCache>(pulse(), config_.dt, config_.resolved_cache_dir());
    }
    return *cache_;
}

std::vector<LogicalRow> Experiment::sweep(const std::vector<IonizationSchedule> &schedules) {
    std::vector<LogicalRow> rows;
    for (int d : config_.distances) {
        for (const auto &s : schedules) {
            for (double g : config_.sample_gammas()) {
                rows.push_back(run_cell(cache(), config_, d, g, s));
            }
        }
    }
    return rows;
}

std::vector<ScheduleCensus> Experiment::hook_census(const std::vector<IonizationSchedule> &schedules) {
    std::vector<ScheduleCensus> out;
    for (const auto &s : schedules) {
        std::vector<PauliChannel> series;
        for (double g : config_.fit_gammas) {
            series.push_back(cache().get(g, s));
        }
        const PauliChannel &ref = cache().get(config_.reference_gamma, s);
        out.push_back(in_stage("census " + s.label(), [&] { return census(series, ref); }));
    }
    return out;
}

void Experiment::write_artifact(const std::string &name, const std::string &content) {
    write_file(config_.output_dir / name, content);
    written_[name] = sha256_hex(content);
}

std::vector<std::string> Experiment::run(const std::string &figure) {
    const auto names = figure_names();
    require(std::find(names.begin(), names.end(), figure) != names.end(), "unknown figure '" + figure + "'");
    fs::create_directories(config_.output_dir);
    const std::string config_text = config_.to_json();
    const fs::path config_path = config_.output_dir / "config.resolved.json";
    if (fs::exists(config_path)) {
        require(without_workers(read_file(config_path)) == without_workers(config_text),
                "output_dir " + config_.output_dir.string() + " holds a run with a different config");
    }
    write_file(config_path, config_text);

    written_.clear();
    if (figure == "fig2") {
        const auto c = hook_census(figure2_schedules());
        write_artifact("census_fig2.csv", census_csv(c));
        write_artifact("hook_counts_fig2.csv", hook_counts_csv(c));
    } else {
        const auto schedules = figure == "fig1c" ? figure1c_schedules(config_) : selected_location_schedules();
        const auto rows = sweep(schedules);
        write_artifact("results_" + figure + ".csv", results_csv(rows));
        write_artifact("nu_" + figure + ".csv", nu_csv(fit_all(rows, config_.nu_window)));
    }

    ojson manifest = manifest_of(config_.output_dir);
    manifest["schema"] = kManifestSchema;
    manifest["config_sha256"] = sha256_hex(without_workers(config_text));
    manifest["pulse_id"] = pulse().id();
    ojson files = ojson::object();
    std::vector<std::string> out;
    for (const auto &[name, hash] : written_) {
        files[name] = hash;
        out.push_back(name);
    }
    manifest["runs"][figure] = files;
    write_file(config_.output_dir / "manifest.json", manifest.dump(2) + "\n");
    return out;
}

std::vector<std::string> verify_run(const fs::path &run_dir, int workers) {
    const fs::path config_path = run_dir / "config.resolved.json";
    require(fs::exists(config_path), run_dir.string() + " has no config.resolved.json");
    require(fs::exists(run_dir / "manifest.json"), run_dir.string() + " has no manifest.json");
    ExperimentConfig config = ExperimentConfig::from_json(read_file(config_path));
    const ojson manifest = manifest_of(run_dir);
    if (manifest.value("config_sha256", std::string{}) !=
        sha256_hex(without_workers(read_file(config_path)))) {
        throw IntegrityError("config.resolved.json does not match the manifest");
    }
    const fs::path scratch = run_dir / ".verify";
    fs::remove_all(scratch);
    config.output_dir = scratch;
    config.cache_dir = scratch / "cache";
    if (workers > 0) {
        config.workers = workers;
    }
    std::vector<std::string> mismatches;
    for (auto it = manifest["runs"].begin(); it != manifest["runs"].end(); ++it) {
        Experiment exp(config);
        exp.run(it.key());
        for (auto f = it.value().begin(); f != it.value().end(); ++f) {
            const fs::path original = run_dir / f.key();
            const std::string expected = f.value().get<std::string>();
            const bool on_disk = fs::exists(original) && sha256_hex(read_file(original)) == expected;
            const bool recomputed = sha256_hex(read_file(scratch / f.key())) == expected;
            if (!on_disk || !recomputed) {
                mismatches.push_back(f.key());
            }
        }
    }
    fs::remove_all(scratch);
    return mismatches;
}

}  // namespace rydqec
