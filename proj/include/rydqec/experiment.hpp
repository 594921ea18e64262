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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rydqec/analysis.hpp"
#include "rydqec/code.hpp"
#include "rydqec/decoder.hpp"
#include "rydqec/dynamics.hpp"
#include "rydqec/pulse.hpp"
#include "rydqec/sampler.hpp"
#include "rydqec/twirl.hpp"

namespace rydqec {

inline constexpr const char *kConfigSchema = "rydqec-config/1";
inline constexpr const char *kManifestSchema = "rydqec-manifest/1";

std::vector<double> log_grid(double lo, double hi, int n);

struct ExperimentConfig {
    /// Pulse CSV; when empty the pulse is synthesized from `synth`.
    std::filesystem::path pulse_file;
    SynthesisOptions synth;
    double dt = 1e-3;
    std::vector<double> mc_gammas = log_grid(1e-4, 1e-2, 8);
    /// Extra low-rate points sampled for the exponent fits.
    std::vector<double> nu_gammas = log_grid(1e-4, 1e-3, 10);
    std::vector<double> fit_gammas = log_grid(1e-5, 1e-3, 8);
    double reference_gamma = kReferenceGamma;
    std::vector<int> distances{3, 5};
    std::vector<double> p_depl{1.0, 0.9, 0.75, 0.5, 0.0};
    StabilizerType memory_basis = StabilizerType::Z;
    BasisScheduling scheduling = BasisScheduling::Sequential;
    ShotPolicy shots{1000000, 20000, 0.05, 1};
    std::uint64_t seed = 1;
    int workers = 1;
    double p_floor = 1e-12;
    int decoder_cap = 16;
    bool uniform_weights = false;
    NuWindow nu_window{0.2, std::numeric_limits<double>::infinity(), 3, 3};
    bool large = false;
    std::filesystem::path output_dir = "runs/default";
    /// Defaults to <output_dir>/cache.
    std::filesystem::path cache_dir;

    void validate() const;
    std::filesystem::path resolved_cache_dir() const;
    /// Sorted union of the Monte Carlo and exponent-fit grids.
    std::vector<double> sample_gammas() const;
    /// Canonical JSON with every field resolved.
    std::string to_json() const;
    /// Relative paths are resolved against `base_dir`.
    static ExperimentConfig from_json(const std::string &text, const std::filesystem::path &base_dir = {});
    static ExperimentConfig load(const std::filesystem::path &path);
};

/// Hash-keyed store of twirled plaquette channels.
class ChannelCache {
  public:
    ChannelCache(const PulseProfile &profile, double dt, std::filesystem::path dir);
    const PauliChannel &get(double gamma, const IonizationSchedule &schedule);
    std::string key(double gamma, const IonizationSchedule &schedule) const;
    int builds() const { return builds_; }
    const PulseProfile &profile() const { return profile_; }

  private:
    PulseProfile profile_;
    double dt_;
    std::filesystem::path dir_;
    std::map<double, QutritChannel> gates_;
    std::map<std::string, PauliChannel> memo_;
    int builds_ = 0;
};

struct LogicalRow {
    int d;
    double gamma;
    IonizationSchedule schedule;
    LogicalEstimate estimate;
    std::uint64_t seed;
};

std::string results_csv(const std::vector<LogicalRow> &rows);
std::vector<LogicalRow> read_results_csv(const std::string &text);
std::string nu_csv(const std::vector<NuFit> &fits);
/// Fits every (d, schedule) series in `rows`; series without a valid window get nu = nan.
std::vector<NuFit> fit_all(const std::vector<LogicalRow> &rows, const NuWindow &window);

std::string census_csv(const std::vector<ScheduleCensus> &censuses);
std::string hook_counts_csv(const std::vector<ScheduleCensus> &censuses);

std::uint64_t cell_seed(std::uint64_t seed, int d, double gamma, const IonizationSchedule &schedule);

/// One (d, gamma, schedule) point of a logical sweep.
LogicalRow run_cell(ChannelCache &cache, const ExperimentConfig &config, int d, double gamma,
                    const IonizationSchedule &schedule);

class Experiment {
  public:
    explicit Experiment(ExperimentConfig config);
    const ExperimentConfig &config() const { return config_; }
    const PulseProfile &pulse();
    ChannelCache &cache();

    std::vector<LogicalRow> sweep(const std::vector<IonizationSchedule> &schedules);
    std::vector<ScheduleCensus> hook_census(const std::vector<IonizationSchedule> &schedules);

    /// Runs a figure and writes its artifacts plus manifest; returns the written file names.
    std::vector<std::string> run(const std::string &figure);

  private:
    void write_artifact(const std::string &name, const std::string &content);
    ExperimentConfig config_;
    std::unique_ptr<PulseProfile> pulse_;
    std::unique_ptr<ChannelCache> cache_;
    std::map<std::string, std::string> written_;
};

std::vector<IonizationSchedule> figure1c_schedules(const ExperimentConfig &config);
std::vector<IonizationSchedule> figure2_schedules();
std::vector<std::string> figure_names();

/// Recomputes every figure recorded in the manifest of `run_dir` into a scratch directory and compares hashes.
/// Returns the mismatching file names (empty on success).
std::vector<std::string> verify_run(const std::filesystem::path &run_dir, int workers = -1);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, const std::string &content);

}  // namespace rydqec
