#pragma once

// Experiment plumbing behind the command-line tool: resolve inputs, run each
// (strategy, load, repetition) and write result tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "arrivals.hpp"
#include "behavior_model.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "report.hpp"
#include "sim_engine.hpp"
#include "strategy.hpp"
#include "verification.hpp"

namespace smartstream {

enum class output_format { csv, json };

// How rho maps to an arrival rate. `viewed` divides by the mean viewing
// ratio, so rho = 1 means the content actually watched fills the link;
// `full` treats every session as downloading the whole video.
enum class load_basis { viewed, full };

struct experiment_spec {
    sim_config config;
    std::vector<strategy_kind> strategies;
    std::vector<double> rhos; // Poisson loads; run takes at most one
    std::optional<std::string> trace_path;
    double trace_scale = 1.0;
    std::optional<std::string> histogram_path;
    synthetic_params synthetic;
    // Cap capacity at this fraction of SC's peak in an uncapped reference run.
    std::optional<double> target_fraction;
    load_basis basis = load_basis::viewed;
    std::string out; // empty: standard output
    output_format format = output_format::csv;
    std::optional<std::string> ledger_out;
    std::uint32_t repetitions = 1;
};

inline std::vector<strategy_kind> parse_strategy_list(std::string_view list) {
    std::vector<strategy_kind> out;
    for (auto name : text::split(list, ',')) {
        if (name.empty()) continue;
        if (name == "all") {
            for (auto k : {strategy_kind::sc, strategy_kind::sc_plus, strategy_kind::be, strategy_kind::eb,
                           strategy_kind::ew, strategy_kind::bb})
                out.push_back(k);
            continue;
        }
        auto k = parse_strategy(name);
        if (!k) throw invalid_input("unknown strategy `" + std::string(name) + "`");
        out.push_back(*k);
    }
    return out;
}

inline std::vector<double> parse_number_list(std::string_view list, std::string_view what) {
    std::vector<double> out;
    for (auto item : text::split(list, ',')) {
        auto v = text::to_double(item);
        if (!v) throw invalid_input("malformed " + std::string(what) + " `" + std::string(item) + "`");
        out.push_back(*v);
    }
    return out;
}

inline output_format parse_format(std::string_view s) {
    if (s == "csv") return output_format::csv;
    if (s == "json") return output_format::json;
    throw invalid_input("format must be `csv` or `json`");
}

inline load_basis parse_load_basis(std::string_view s) {
    if (s == "viewed") return load_basis::viewed;
    if (s == "full") return load_basis::full;
    throw invalid_input("load basis must be `viewed` or `full`");
}

// Applies a config document to a spec. Keys are sim_config field names plus
// the experiment keys below.
inline void apply_config(experiment_spec& spec, config_document const& doc) {
    for (auto const& [key, entry] : doc) {
        auto const& v = entry.value;
        auto number = [&]() {
            auto x = text::to_double(v);
            if (!x) throw invalid_input("config line " + std::to_string(entry.line) + ": `" + key + "` expects a number");
            return *x;
        };
        try {
            if (apply_sim_key(spec.config, key, v)) continue;
            if (key == "strategy" || key == "strategies") spec.strategies = parse_strategy_list(v);
            else if (key == "rho") spec.rhos = parse_number_list(v, "rho");
            else if (key == "trace") spec.trace_path = v;
            else if (key == "trace_scale") spec.trace_scale = number();
            else if (key == "histogram") spec.histogram_path = v;
            else if (key == "browse_mass") spec.synthetic.browse_mass = number();
            else if (key == "browse_width") spec.synthetic.browse_width = number();
            else if (key == "complete_mass") spec.synthetic.complete_mass = number();
            else if (key == "browse_decay") spec.synthetic.browse_decay = number();
            else if (key == "target_fraction") spec.target_fraction = number();
            else if (key == "load_basis") spec.basis = parse_load_basis(v);
            else if (key == "out") spec.out = v;
            else if (key == "format") spec.format = parse_format(v);
            else if (key == "ledger_out") spec.ledger_out = v;
            else if (key == "repetitions") spec.repetitions = static_cast<std::uint32_t>(number());
            else throw invalid_input("unknown key `" + key + "`");
        } catch (invalid_input const& e) {
            throw invalid_input("config line " + std::to_string(entry.line) + ": " + e.what());
        }
    }
}

inline departure_histogram resolve_model(experiment_spec const& spec) {
    if (spec.histogram_path) return load_histogram(*spec.histogram_path);
    auto sp = spec.synthetic;
    sp.slots = spec.config.video_length;
    return synthetic_model(sp);
}

namespace detail {

inline void validate_common(experiment_spec const& spec) {
    if (spec.strategies.empty()) throw invalid_input("no strategy given");
    if (spec.repetitions == 0) throw invalid_input("repetitions must be at least 1");
    if (spec.target_fraction && !(*spec.target_fraction > 0.0))
        throw invalid_input("target fraction must be positive");
}

struct prepared {
    sim_config config;
    std::vector<std::uint64_t> arrivals;
};

// Arrivals and capacity for one (rho, repetition); rho is ignored in trace
// mode.
inline prepared prepare(experiment_spec const& spec, std::optional<double> rho, departure_histogram const& model,
                        departure_rates const& rates, std::uint32_t rep, std::optional<trace_arrivals> const& trace) {
    prepared p{spec.config, {}};
    p.config.seed = spec.config.seed + rep;
    if (trace) {
        if (p.config.duration == 0) p.config.duration = trace->counts.size();
        auto t = *trace;
        t.scale = spec.trace_scale;
        p.arrivals = realize(t, p.config.duration, p.config.seed);
    } else {
        if (!rho) throw invalid_input("Poisson arrivals need a load (rho)");
        if (!(*rho > 0.0)) throw invalid_input("rho must be positive");
        if (!std::isfinite(p.config.server_capacity))
            throw invalid_input("rho is defined against a finite capacity; give --capacity");
        if (p.config.duration == 0) p.config.duration = 3600;
        double const v = spec.basis == load_basis::viewed ? mean_viewing_ratio(model) : 1.0;
        double const lambda = load_to_arrival_rate(*rho, p.config.server_capacity,
                                                   static_cast<double>(p.config.video_length), p.config.bitrate, v);
        p.arrivals = realize(poisson_arrivals{lambda}, p.config.duration, p.config.seed);
    }
    if (spec.target_fraction) {
        auto ref = p.config;
        ref.server_capacity = unlimited_capacity;
        auto const res = run(ref, make_strategy(strategy_kind::sc, rates), p.arrivals, model);
        p.config.server_capacity = target_bandwidth_from_peak(res.report.peak_bw, *spec.target_fraction);
    }
    return p;
}

} // namespace detail

struct experiment_output {
    std::vector<result_row> rows;
    std::vector<ledger_block> ledgers;
};

// One row per (rho, repetition, strategy), in that nesting order.
inline experiment_output run_experiment(experiment_spec const& spec, std::vector<std::optional<double>> const& loads) {
    detail::validate_common(spec);
    auto const model = resolve_model(spec);
    auto const rates = rates_from_histogram(model);
    std::optional<trace_arrivals> trace;
    if (spec.trace_path) trace = load_trace(*spec.trace_path);

    experiment_output out;
    for (auto const& rho : loads) {
        for (std::uint32_t rep = 0; rep < spec.repetitions; ++rep) {
            auto const p = detail::prepare(spec, rho, model, rates, rep, trace);
            for (auto k : spec.strategies) {
                auto res = run(p.config, make_strategy(k, rates), p.arrivals, model);
                out.rows.push_back({std::string(to_string(k)), trace ? std::nullopt : rho, rep, p.config.seed,
                                    p.config.server_capacity, res.report});
                if (spec.ledger_out) out.ledgers.push_back({std::string(to_string(k)), rep, std::move(res.ledgers)});
            }
        }
    }
    return out;
}

namespace detail {

template <typename Write>
void write_to(std::string const& path, Write&& write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw invalid_input("cannot write '" + path + "'");
    write(f);
}

inline void write_output(experiment_spec const& spec, experiment_output const& out) {
    write_to(spec.out, [&](std::ostream& os) {
        if (spec.format == output_format::csv) write_csv(os, out.rows);
        else write_json(os, out.rows);
    });
    if (spec.ledger_out) write_to(*spec.ledger_out, [&](std::ostream& os) { write_ledger_csv(os, out.ledgers); });
}

} // namespace detail

inline experiment_output cmd_run(experiment_spec const& spec) {
    if (spec.rhos.size() > 1) throw invalid_input("run takes one rho; use sweep for several");
    std::optional<double> rho;
    if (!spec.rhos.empty()) rho = spec.rhos.front();
    if (spec.trace_path && rho) throw invalid_input("give either a trace or rho, not both");
    auto out = run_experiment(spec, {rho});
    detail::write_output(spec, out);
    return out;
}

inline experiment_output cmd_sweep(experiment_spec const& spec) {
    if (spec.trace_path) throw invalid_input("sweep varies rho and needs Poisson arrivals, not a trace");
    if (spec.rhos.empty()) throw invalid_input("sweep needs at least one rho");
    std::vector<std::optional<double>> loads(spec.rhos.begin(), spec.rhos.end());
    auto out = run_experiment(spec, loads);
    detail::write_output(spec, out);
    return out;
}

inline void cmd_gen_trace(diurnal_params const& dp, std::string const& path) {
    save_trace(synthetic_diurnal_trace(dp), path);
}

inline void cmd_gen_histogram(synthetic_params const& sp, std::string const& path) {
    save_histogram(synthetic_model(sp), path);
}

// Prints one line per claim; returns true if all passed.
inline bool cmd_verify(std::uint64_t seed, std::ostream& os) {
    bool all = true;
    for (auto const& c : verify_all(seed)) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.passed;
    }
    return all;
}

} // namespace smartstream
