// smartstream: run, sweep, generate inputs for and verify the streaming
// simulator.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smartstream/experiment.hpp"

namespace ss = smartstream;

namespace {

// Flags shared by run and sweep. Everything is optional so that unset flags
// fall through to the config file and then to the built-in defaults.
struct experiment_flags {
    std::optional<std::string> config;
    std::vector<std::string> strategies;
    std::vector<double> rhos;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> trace;
    std::optional<double> trace_scale;
    std::optional<std::string> histogram;
    std::optional<std::string> capacity;
    std::optional<double> target_fraction;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> ledger_out;
    std::optional<std::uint32_t> repetitions;
    std::optional<std::size_t> duration;
    std::optional<std::size_t> warmup;
    std::optional<std::string> playback;
    std::optional<std::string> load_basis;
};

void add_experiment_flags(CLI::App& app, experiment_flags& f, bool sweep) {
    app.add_option("--config", f.config, "key = value file; flags override its keys");
    app.add_option("--strategy", f.strategies, "sc, sc+, be, eb, ew, bb or all; repeat or comma-separate")
        ->delimiter(',');
    if (sweep) app.add_option("--rho", f.rhos, "offered loads, comma-separated")->delimiter(',');
    else app.add_option("--rho", f.rhos, "offered load (Poisson arrivals)")->expected(1);
    app.add_option("--seed", f.seed, "seed for all randomness");
    if (!sweep) {
        app.add_option("--trace", f.trace, "arrival trace file");
        app.add_option("--trace-scale", f.trace_scale, "multiply trace counts");
        app.add_option("--target-fraction", f.target_fraction, "capacity as a fraction of SC's uncapped peak");
    }
    app.add_option("--histogram", f.histogram, "departure histogram file (default: synthetic model)");
    app.add_option("--capacity", f.capacity, "server capacity in Mb/s, or `unlimited`");
    app.add_option("--out", f.out, "results file (default: stdout)");
    app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--ledger-out", f.ledger_out, "per-slot ledger CSV");
    app.add_option("--repetitions", f.repetitions, "repetitions, seeds seed..seed+n-1")->check(CLI::PositiveNumber);
    app.add_option("--duration", f.duration, "slots to simulate");
    app.add_option("--warmup", f.warmup, "slots excluded from metrics");
    app.add_option("--playback", f.playback, "freeze or skip")->check(CLI::IsMember({"freeze", "skip"}));
    app.add_option("--load-basis", f.load_basis, "viewed or full")->check(CLI::IsMember({"viewed", "full"}));
}

ss::experiment_spec build_spec(experiment_flags const& f) {
    ss::experiment_spec spec;
    if (f.config) ss::apply_config(spec, ss::load_config(*f.config));
    if (!f.strategies.empty()) {
        spec.strategies.clear();
        for (auto const& s : f.strategies) {
            auto ks = ss::parse_strategy_list(s);
            spec.strategies.insert(spec.strategies.end(), ks.begin(), ks.end());
        }
    }
    if (!f.rhos.empty()) spec.rhos = f.rhos;
    if (f.seed) spec.config.seed = *f.seed;
    if (f.trace) spec.trace_path = f.trace;
    if (f.trace_scale) spec.trace_scale = *f.trace_scale;
    if (f.histogram) spec.histogram_path = f.histogram;
    if (f.capacity) spec.config.server_capacity = ss::parse_capacity(*f.capacity);
    if (f.target_fraction) spec.target_fraction = f.target_fraction;
    if (f.out) spec.out = *f.out;
    if (f.format) spec.format = ss::parse_format(*f.format);
    if (f.ledger_out) spec.ledger_out = f.ledger_out;
    if (f.repetitions) spec.repetitions = *f.repetitions;
    if (f.duration) spec.config.duration = *f.duration;
    if (f.warmup) spec.config.warmup = *f.warmup;
    if (f.playback) spec.config.playback = ss::parse_playback(*f.playback);
    if (f.load_basis) spec.basis = ss::parse_load_basis(*f.load_basis);
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slotted video-on-demand streaming simulator with early viewer departure"};
    app.require_subcommand(1);

    experiment_flags run_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "simulate each strategy once per repetition");
    add_experiment_flags(*run, run_flags, false);
    auto* sweep = app.add_subcommand("sweep", "simulate each strategy at each load");
    add_experiment_flags(*sweep, sweep_flags, true);

    auto* gen = app.add_subcommand("gen", "write a synthetic trace or departure histogram");
    gen->require_subcommand(1);
    ss::diurnal_params dp;
    std::string trace_out;
    auto* gen_trace = gen->add_subcommand("trace", "two-peak diurnal arrival trace");
    gen_trace->add_option("--out", trace_out, "output file")->required();
    gen_trace->add_option("--slots", dp.slots, "length in seconds");
    gen_trace->add_option("--peak-rate", dp.peak_rate, "mean arrivals per second at the evening peak");
    gen_trace->add_option("--floor", dp.floor_fraction, "overnight rate as a fraction of the peak");
    gen_trace->add_option("--seed", dp.seed, "seed");

    ss::synthetic_params sp;
    std::string hist_out;
    auto* gen_hist = gen->add_subcommand("histogram", "synthetic departure histogram");
    gen_hist->add_option("--out", hist_out, "output file")->required();
    gen_hist->add_option("--slots", sp.slots, "bins (video length in seconds)");
    gen_hist->add_option("--browse-mass", sp.browse_mass, "departure mass in the browsing phase");
    gen_hist->add_option("--browse-width", sp.browse_width, "browsing phase as a fraction of the video");
    gen_hist->add_option("--complete-mass", sp.complete_mass, "mass of viewers who watch to the end");
    gen_hist->add_option("--browse-decay", sp.browse_decay, "last browsing bin relative to the first");

    std::uint64_t verify_seed = 12345;
    auto* verify = app.add_subcommand("verify", "check the steady-state claims on small instances");
    verify->add_option("--seed", verify_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) ss::cmd_run(build_spec(run_flags));
        else if (sweep->parsed()) ss::cmd_sweep(build_spec(sweep_flags));
        else if (gen_trace->parsed()) ss::cmd_gen_trace(dp, trace_out);
        else if (gen_hist->parsed()) ss::cmd_gen_histogram(sp, hist_out);
        else if (verify->parsed()) return ss::cmd_verify(verify_seed, std::cout) ? 0 : 1;
    } catch (ss::parse_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (ss::invalid_input const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
