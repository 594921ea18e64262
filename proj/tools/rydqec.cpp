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
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rydqec/errors.hpp"
#include "rydqec/experiment.hpp"
#include "rydqec/hashing.hpp"

using namespace rydqec;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIntegrity = 3;

PulseProfile load_or_synth(const std::string &path) {
    if (path.empty()) {
        return synthesize_pulse(GateModel{}, SynthesisOptions{});
    }
    return read_pulse(path);
}

void add_pulse(CLI::App *cmd) {
    cmd->add_option("--pulse", "Pulse CSV (synthesized with defaults when omitted)");
}

std::string pulse_arg(CLI::App *cmd) {
    auto *opt = cmd->get_option("--pulse");
    return opt->count() ? opt->as<std::string>() : std::string{};
}

int cmd_pulse_synth(const std::string &out, const SynthesisOptions &opts) {
    const auto p = synthesize_pulse(GateModel{}, opts);
    write_pulse(p, out);
    std::cout << "T=" << format_double(p.total_time()) << " theta=" << format_double(p.theta)
              << " residual=" << format_double(p.residual) << " id=" << p.id() << "\n";
    return 0;
}

int cmd_pulse_verify(const std::string &in) {
    const auto p = read_pulse(in);
    const auto check = verify_cz_algebra(propagate_restricted(p));
    std::cout << "T=" << format_double(p.total_time()) << " theta=" << format_double(check.theta)
              << " residual=" << format_double(check.residual) << " id=" << p.id() << "\n";
    if (check.residual > 1e-6) {
        std::cerr << "pulse verify: residual exceeds 1e-6\n";
        return kExitIntegrity;
    }
    return 0;
}

std::string fit_order_csv(const std::vector<PauliChannel> &series) {
    std::vector<double> gammas;
    for (const auto &c : series) {
        gammas.push_back(c.gamma);
    }
    std::string out = "pauli,n,A,B,rms\n";
    for (int i = 1; i < kPauliCount; ++i) {
        std::vector<double> lambdas;
        for (const auto &c : series) {
            lambdas.push_back(c.probs[i]);
        }
        if (*std::max_element(lambdas.begin(), lambdas.end()) <= kLambdaFloor) {
            continue;
        }
        const auto f = fit_order(gammas, lambdas);
        out += PauliString::from_index(i).label() + "," + std::to_string(f.n) + "," + format_double(f.A) + "," +
               format_double(f.B) + "," + format_double(f.rms) + "\n";
    }
    return out;
}

std::vector<PauliChannel> read_series(const std::vector<std::string> &files) {
    std::vector<PauliChannel> series;
    for (const auto &f : files) {
        series.push_back(read_pauli_channel(f));
    }
    std::sort(series.begin(), series.end(), [](const auto &a, const auto &b) { return a.gamma < b.gamma; });
    return series;
}

// One line per shot: detector events, matched pairs (B = boundary), predicted and actual flips.
void trace_shots(const Sampler &sampler, const Decoder &decoder, std::uint64_t seed, std::uint64_t n) {
    for (std::uint64_t shot = 0; shot < n; ++shot) {
        Signature sig = sampler.sample_shot(seed, shot);
        const bool actual = sig.logical;
        sig.logical = false;
        const auto defects = decoder.defects_of(sig);
        const Correction c = defects.empty() ? Correction{} : decoder.decode(defects);
        std::cout << "shot " << shot << " defects";
        for (int d : defects) {
            std::cout << ' ' << decoder.graph().detector_ids()[d];
        }
        std::cout << " pairs";
        for (const auto &[a, b] : c.pairs) {
            std::cout << ' ' << decoder.graph().detector_ids()[a] << '-'
                      << (b == decoder.graph().boundary() ? std::string("B")
                                                          : std::to_string(decoder.graph().detector_ids()[b]));
        }
        std::cout << " predicted " << c.logical << " actual " << actual << (c.logical != actual ? " FAIL" : "")
                  << "\n";
    }
}

void report_failed_fits(const std::vector<NuFit> &fits) {
    for (const auto &f : fits) {
        if (std::isnan(f.nu)) {
            std::cerr << "fit-nu: no valid window for d=" << f.d << " " << f.schedule << "\n";
        }
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"rydqec: Rydberg-gate surface-code noise pipeline"};
    app.require_subcommand(1);

    // pulse
    auto *pulse = app.add_subcommand("pulse", "Synthesize or verify a CZ pulse");
    pulse->require_subcommand(1);
    auto *synth = pulse->add_subcommand("synth", "Synthesize a time-optimal CZ pulse");
    std::string synth_out;
    SynthesisOptions synth_opts;
    synth->add_option("--out", synth_out, "Output pulse CSV")->required();
    synth->add_option("--segments", synth_opts.n_segments, "Number of piecewise-constant phase segments");
    synth->add_option("--seed", synth_opts.seed, "Seed for random starts");
    synth->add_option("--starts", synth_opts.random_starts, "Random starts per duration");
    synth->add_option("--tol", synth_opts.tol, "Residual tolerance");
    auto *verify_pulse = pulse->add_subcommand("verify", "Check the CZ relations of a pulse");
    std::string verify_in;
    verify_pulse->add_option("file,--in", verify_in, "Pulse CSV")->required()->check(CLI::ExistingFile);

    // channel
    auto *channel = app.add_subcommand("channel", "Microscopic plaquette channels");
    channel->require_subcommand(1);
    auto *build = channel->add_subcommand("build", "Compose the plaquette superoperator stages");
    double ch_gamma = 0, ch_dt = 1e-3;
    double ch_p_depl = -1;
    std::string ch_schedule, ch_out;
    add_pulse(build);
    build->add_option("--gamma", ch_gamma, "Decay rate in units of omega_max")->required();
    build->add_option("--dt", ch_dt, "Trotter step");
    build->add_option("--schedule", ch_schedule, "Ionization schedule, e.g. AfterEveryGateBoth@0.75")->required();
    build->add_option("--p-depl", ch_p_depl, "Override the ionization success probability of the schedule");
    build->add_option("--out", ch_out, "Output channel file")->required();

    // twirl
    auto *twirl_cmd = app.add_subcommand("twirl", "Twirl a plaquette channel into a Pauli channel");
    std::string tw_in, tw_out;
    bool tw_xframe = false;
    add_pulse(twirl_cmd);
    twirl_cmd->add_option("--channel", tw_in, "Channel file from `channel build`")
        ->required()
        ->check(CLI::ExistingFile);
    twirl_cmd->add_option("--out", tw_out, "Output Pauli channel JSON")->required();
    twirl_cmd->add_flag("--x-frame", tw_xframe, "Relabel into the X-plaquette frame");

    // analyze
    auto *analyze = app.add_subcommand("analyze", "Fits and hook census");
    analyze->require_subcommand(1);
    std::vector<std::string> an_in;
    std::string an_out, an_ref;
    auto *fit_order_cmd = analyze->add_subcommand("fit-order", "Fit A g^n + B g^(n+1) to every Pauli probability");
    fit_order_cmd->add_option("--in", an_in, "Pauli channel JSON files (one per gamma)")->required();
    fit_order_cmd->add_option("--out", an_out, "Output CSV")->required();
    auto *census_cmd = analyze->add_subcommand("census", "Count hook strings of one schedule");
    census_cmd->add_option("--in", an_in, "Pauli channel JSON files (one per gamma)")->required();
    census_cmd->add_option("--ref", an_ref, "Pauli channel at the reference gamma")->required();
    census_cmd->add_option("--out", an_out, "Output census CSV")->required();
    auto *fit_nu_cmd = analyze->add_subcommand("fit-nu", "Fit logical-error exponents from a results CSV");
    NuWindow window{0.2, std::numeric_limits<double>::infinity(), 3, 3};
    fit_nu_cmd->add_option("--in", an_in, "Results CSV")->required();
    fit_nu_cmd->add_option("--out", an_out, "Output exponent CSV")->required();
    fit_nu_cmd->add_option("--max-points", window.max_points, "Lowest qualifying points used per series");
    fit_nu_cmd->add_option("--halfwidth", window.max_rel_halfwidth, "Maximum relative CI half-width");
    fit_nu_cmd->add_option("--gamma-max", window.gamma_max, "Ignore points above this rate");

    // sample
    auto *sample = app.add_subcommand("sample", "Monte Carlo logical error rate for one point");
    int s_d = 3, s_workers = 1, s_cap = 16;
    double s_gamma = 0, s_dt = 1e-3, s_floor = 1e-12;
    std::string s_schedule, s_out, s_basis = "Z", s_graph;
    std::uint64_t s_shots = 0, s_seed = 1, s_trace = 0;
    add_pulse(sample);
    sample->add_option("--d", s_d, "Code distance");
    sample->add_option("--gamma", s_gamma, "Decay rate")->required();
    sample->add_option("--dt", s_dt, "Trotter step");
    sample->add_option("--schedule", s_schedule, "Ionization schedule")->required();
    sample->add_option("--shots", s_shots, "Number of shots")->required();
    sample->add_option("--seed", s_seed, "Seed");
    sample->add_option("--workers", s_workers, "Worker threads");
    sample->add_option("--memory-basis", s_basis, "Memory basis (Z or X)");
    sample->add_option("--p-floor", s_floor, "Drop faults below this probability");
    sample->add_option("--decoder-cap", s_cap, "Largest defect count decoded exactly");
    sample->add_option("--graph-out", s_graph, "Also dump the matching graph as CSV");
    sample->add_option("--trace", s_trace, "Print the decoding of the first N shots");
    sample->add_option("--out", s_out, "Output results CSV")->required();

    // run
    auto *run = app.add_subcommand("run", "Run a figure sweep from a config file");
    std::string run_config, run_figure, run_out;
    int run_workers = 0;
    bool run_large = false;
    run->add_option("figure", run_figure, "fig1c, figS3 or fig2")
        ->required()
        ->check(CLI::IsMember(figure_names()));
    run->add_option("--config", run_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", run_workers, "Override worker threads");
    run->add_option("--out", run_out, "Override output directory");
    run->add_flag("--large", run_large, "Add distances 7 and 9 (multi-hour)");

    // verify
    auto *verify = app.add_subcommand("verify", "Recompute a run directory and compare artifact hashes");
    std::string verify_dir;
    int verify_workers = -1;
    verify->add_option("--run", verify_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    verify->add_option("--workers", verify_workers, "Worker threads for the recomputation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*synth) {
            return cmd_pulse_synth(synth_out, synth_opts);
        }
        if (*verify_pulse) {
            return cmd_pulse_verify(verify_in);
        }
        if (*build) {
            const auto profile = load_or_synth(pulse_arg(build));
            auto schedule = IonizationSchedule::parse(ch_schedule);
            if (ch_p_depl >= 0) {
                schedule.p_depl = ch_p_depl;
                schedule.validate();
            }
            const auto ch = compose_plaquette(profile, NoiseParams{ch_gamma, ch_dt}, schedule);
            save_channel(ch, ch_out);
            return 0;
        }
        if (*twirl_cmd) {
            const auto profile = load_or_synth(pulse_arg(twirl_cmd));
            auto pc = extract_pauli_channel(load_channel(tw_in), profile);
            if (tw_xframe) {
                pc = to_x_plaquette_frame(pc);
            }
            write_pauli_channel(pc, tw_out);
            return 0;
        }
        if (*fit_order_cmd) {
            write_file(an_out, fit_order_csv(read_series(an_in)));
            return 0;
        }
        if (*census_cmd) {
            const auto c = census(read_series(an_in), read_pauli_channel(an_ref));
            write_file(an_out, census_csv({c}));
            std::cout << c.schedule.label() << " X:" << c.count(StabilizerType::X)
                      << " Z:" << c.count(StabilizerType::Z) << "\n";
            return 0;
        }
        if (*fit_nu_cmd) {
            std::vector<LogicalRow> rows;
            for (const auto &f : an_in) {
                const auto r = read_results_csv(read_file(f));
                rows.insert(rows.end(), r.begin(), r.end());
            }
            const auto fits = fit_all(rows, window);
            report_failed_fits(fits);
            write_file(an_out, nu_csv(fits));
            return 0;
        }
        if (*sample) {
            ExperimentConfig cfg;
            cfg.dt = s_dt;
            cfg.distances = {s_d};
            cfg.large = s_d > 5;
            cfg.memory_basis = parse_stabilizer_type(s_basis);
            require(s_shots >= 1, "--shots must be >= 1");
            cfg.shots = ShotPolicy{s_shots, 20000, 0.0, 1};
            cfg.workers = s_workers;
            cfg.p_floor = s_floor;
            cfg.decoder_cap = s_cap;
            cfg.seed = s_seed;
            cfg.validate();
            NoiseParams{s_gamma, s_dt}.validate();
            ChannelCache cache(load_or_synth(pulse_arg(sample)), s_dt, {});
            const auto schedule = IonizationSchedule::parse(s_schedule);
            const auto row = run_cell(cache, cfg, s_d, s_gamma, schedule);
            write_file(s_out, results_csv({row}));
            if (!s_graph.empty() || s_trace > 0) {
                const auto circuit = build_circuit(build_layout(s_d), CircuitOptions{cfg.memory_basis});
                const FaultPropagator prop(circuit);
                const auto &channel = cache.get(s_gamma, schedule);
                const auto dem = enumerate_faults(circuit, prop, channel, s_floor);
                const auto graph = MatchingGraph::build(dem, circuit, cfg.memory_basis);
                if (!s_graph.empty()) {
                    write_file(s_graph, graph.edges_csv());
                }
                trace_shots(Sampler(prop, channel), Decoder(graph, s_cap), row.seed, s_trace);
            }
            std::cout << "p_L=" << format_double(row.estimate.p_L) << " [" << format_double(row.estimate.ci.lo) << ", "
                      << format_double(row.estimate.ci.hi) << "] shots=" << row.estimate.n_shots << "\n";
            return 0;
        }
        if (*run) {
            ExperimentConfig cfg = ExperimentConfig::load(run_config);
            if (run_workers > 0) {
                cfg.workers = run_workers;
            }
            if (!run_out.empty()) {
                cfg.output_dir = run_out;
            }
            if (run_large) {
                cfg.large = true;
                for (int d : {7, 9}) {
                    if (std::find(cfg.distances.begin(), cfg.distances.end(), d) == cfg.distances.end()) {
                        cfg.distances.push_back(d);
                    }
                }
            }
            Experiment exp(cfg);
            for (const auto &f : exp.run(run_figure)) {
                std::cout << (cfg.output_dir / f).string() << "\n";
            }
            if (run_figure != "fig2") {
                report_failed_fits(fit_all(read_results_csv(read_file(cfg.output_dir / ("results_" + run_figure + ".csv"))),
                                           cfg.nu_window));
            }
            return 0;
        }
        if (*verify) {
            const auto bad = verify_run(verify_dir, verify_workers);
            if (!bad.empty()) {
                for (const auto &b : bad) {
                    std::cerr << "verify: mismatch in " << b << "\n";
                }
                return kExitIntegrity;
            }
            std::cout << "verify: all artifacts reproduced\n";
            return 0;
        }
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IntegrityError &e) {
        std::cerr << "integrity failure: " << e.what() << "\n";
        return kExitIntegrity;
    }
    return 0;
}
