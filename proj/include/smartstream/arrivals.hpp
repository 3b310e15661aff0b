#pragma once

// Per-slot arrival counts: Poisson or replayed from a trace file.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "text_io.hpp"

namespace smartstream {

struct poisson_arrivals {
    double rate = 0.0; // mean arrivals per slot
};

struct trace_arrivals {
    std::vector<std::uint64_t> counts;
    double scale = 1.0;
};

using arrival_process = std::variant<poisson_arrivals, trace_arrivals>;

inline std::vector<std::uint64_t> poisson_counts(double rate, std::size_t slots, rng& gen) {
    if (!(rate >= 0.0)) throw invalid_input("arrival rate must be nonnegative");
    std::vector<std::uint64_t> out(slots);
    for (auto& c : out) c = gen.poisson(rate);
    return out;
}

// Multiplies every count by `factor`, rounding stochastically so that the
// expected count is exact.
inline std::vector<std::uint64_t> scale_counts(std::vector<std::uint64_t> const& counts, double factor, rng& gen) {
    if (!(factor > 0.0)) throw invalid_input("trace scale must be positive");
    std::vector<std::uint64_t> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double const x = factor * static_cast<double>(counts[i]);
        double const whole = std::floor(x);
        out[i] = static_cast<std::uint64_t>(whole) + (gen.uniform() < x - whole ? 1u : 0u);
    }
    return out;
}

// Arrival counts for the first `slots` slots of the process. A trace is
// replayed as-is (scaled if requested) and ignores `slots`.
inline std::vector<std::uint64_t> realize(arrival_process const& process, std::size_t slots, std::uint64_t seed) {
    if (auto const* p = std::get_if<poisson_arrivals>(&process)) {
        rng gen(seed, stream::arrivals);
        return poisson_counts(p->rate, slots, gen);
    }
    auto const& t = std::get<trace_arrivals>(process);
    if (t.scale == 1.0) return t.counts;
    rng gen(seed, stream::trace_scaling);
    return scale_counts(t.counts, t.scale, gen);
}

// Trace files: one nonnegative integer per line (arrivals in that second), or
// `slot,count` rows. `#` comments and blank lines are ignored.
inline trace_arrivals load_trace(std::string const& path) {
    trace_arrivals out;
    for (auto const& line : text::read_lines(path)) {
        auto fields = text::split(line.text, ',');
        std::string_view value;
        if (fields.size() == 1) {
            value = fields[0];
        } else if (fields.size() == 2) {
            auto slot = text::to_int(fields[0]);
            if (!slot) throw parse_error(path, line.number, "malformed slot index");
            if (*slot != static_cast<std::int64_t>(out.counts.size()))
                throw parse_error(path, line.number, "slot indices must be consecutive starting at 0");
            value = fields[1];
        } else {
            throw parse_error(path, line.number, "expected `count` or `slot,count`");
        }
        auto count = text::to_int(value);
        if (!count) throw parse_error(path, line.number, "malformed count '" + std::string(value) + "'");
        if (*count < 0) throw invalid_input(path + ":" + std::to_string(line.number) + ": negative arrival count");
        out.counts.push_back(static_cast<std::uint64_t>(*count));
    }
    return out;
}

inline void save_trace(std::vector<std::uint64_t> const& counts, std::string const& path) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot write '" + path + "'");
    for (auto c : counts) out << c << '\n';
}

struct diurnal_params {
    std::size_t slots = 86400;
    // Mean arrivals per slot at the evening peak.
    double peak_rate = 20.0;
    // Overnight floor as a fraction of the peak.
    double floor_fraction = 0.08;
    std::uint64_t seed = 12345;
};

// Synthetic one-day arrival trace with a midday and a (higher) evening peak.
// Not measured data: a shape stand-in for replay experiments.
inline std::vector<std::uint64_t> synthetic_diurnal_trace(diurnal_params const& dp) {
    if (dp.slots == 0) throw invalid_input("trace needs at least one slot");
    if (!(dp.peak_rate > 0.0)) throw invalid_input("peak rate must be positive");
    if (!(dp.floor_fraction >= 0.0 && dp.floor_fraction < 1.0))
        throw invalid_input("floor fraction must lie in [0,1)");

    auto bump = [](double hour, double centre, double width) {
        // Distance on the 24h circle.
        double d = std::fabs(hour - centre);
        d = std::min(d, 24.0 - d);
        return std::exp(-0.5 * (d / width) * (d / width));
    };
    auto shape = [&](double hour) {
        return dp.floor_fraction + (1.0 - dp.floor_fraction) *
                                       std::max(0.7 * bump(hour, 12.5, 1.8), bump(hour, 21.0, 2.2));
    };

    rng gen(dp.seed, stream::trace_generation);
    std::vector<std::uint64_t> out(dp.slots);
    double const day = static_cast<double>(dp.slots);
    for (std::size_t s = 0; s < dp.slots; ++s) {
        double const hour = 24.0 * static_cast<double>(s) / day;
        out[s] = gen.poisson(dp.peak_rate * shape(hour));
    }
    return out;
}

// Finite server capacity for re-running a trace: a fraction of the peak
// bandwidth measured in an uncapped reference run.
inline double target_bandwidth_from_peak(double peak_bandwidth, double fraction) {
    if (!(peak_bandwidth > 0.0) || !(fraction > 0.0))
        throw invalid_input("peak bandwidth and fraction must be positive");
    return fraction * peak_bandwidth;
}

} // namespace smartstream
