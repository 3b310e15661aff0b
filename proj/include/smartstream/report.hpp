#pragma once

// Result tables: CSV and JSON report rows, and per-slot ledger export.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "metrics.hpp"
#include "strategy.hpp"
#include "text_io.hpp"

namespace smartstream {

struct result_row {
    std::string strategy;
    std::optional<double> rho; // absent for trace-driven runs
    std::uint32_t repetition = 0;
    std::uint64_t seed = 0;
    double capacity = 0.0;
    metrics_report metrics;
};

inline constexpr char const* report_csv_header =
    "strategy,rho,percent_user,avg_n_freeze,avg_t_freeze,freeze_ratio,rate_freeze,wasted_bw,peak_bw,sessions";

inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "unlimited" : "-unlimited";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline void write_csv(std::ostream& out, std::vector<result_row> const& rows) {
    out << report_csv_header << '\n';
    for (auto const& r : rows) {
        auto const& m = r.metrics;
        out << r.strategy << ',' << (r.rho ? format_number(*r.rho) : std::string{}) << ','
            << format_number(m.percent_user) << ',' << format_number(m.avg_n_freeze) << ','
            << format_number(m.avg_t_freeze) << ',' << format_number(m.freeze_ratio) << ','
            << format_number(m.rate_freeze) << ',' << format_number(m.wasted_bw) << ','
            << format_number(m.peak_bw) << ',' << m.sessions_completed << '\n';
    }
}

inline nlohmann::ordered_json to_json(result_row const& r) {
    auto const& m = r.metrics;
    nlohmann::ordered_json j;
    j["strategy"] = r.strategy;
    j["rho"] = r.rho ? nlohmann::ordered_json(*r.rho) : nlohmann::ordered_json(nullptr);
    j["repetition"] = r.repetition;
    j["seed"] = r.seed;
    j["capacity"] = std::isfinite(r.capacity) ? nlohmann::ordered_json(r.capacity)
                                              : nlohmann::ordered_json("unlimited");
    j["percent_user"] = m.percent_user;
    j["avg_n_freeze"] = m.avg_n_freeze;
    j["avg_t_freeze"] = m.avg_t_freeze;
    j["freeze_ratio"] = m.freeze_ratio;
    j["rate_freeze"] = m.rate_freeze;
    j["wasted_bw"] = m.wasted_bw;
    j["peak_bw"] = m.peak_bw;
    j["sessions"] = m.sessions_completed;
    j["empty"] = m.empty;
    return j;
}

inline void write_json(std::ostream& out, std::vector<result_row> const& rows) {
    auto doc = nlohmann::ordered_json::array();
    for (auto const& r : rows) doc.push_back(to_json(r));
    out << doc.dump(2) << '\n';
}

// Reads a table written by write_csv. Numbers round-trip to ten significant
// digits; repetition, seed and capacity are not part of the CSV (see JSON).
inline std::vector<result_row> load_results_csv(std::string const& path) {
    auto lines = text::read_lines(path);
    if (lines.empty() || lines.front().text != report_csv_header)
        throw parse_error(path, lines.empty() ? 0 : lines.front().number, "missing results header");
    std::vector<result_row> rows;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        auto const& line = lines[k];
        auto f = text::split(line.text, ',');
        if (f.size() != 10) throw parse_error(path, line.number, "expected 10 fields");
        auto num = [&](std::string_view s) {
            if (s == "unlimited") return unlimited_capacity;
            auto v = text::to_double(s);
            if (!v) throw parse_error(path, line.number, "malformed number '" + std::string(s) + "'");
            return *v;
        };
        auto integer = [&](std::string_view s) {
            auto v = text::to_int(s);
            if (!v || *v < 0) throw parse_error(path, line.number, "malformed integer '" + std::string(s) + "'");
            return static_cast<std::uint64_t>(*v);
        };
        result_row r;
        r.strategy = std::string(f[0]);
        if (!f[1].empty()) r.rho = num(f[1]);
        auto& m = r.metrics;
        m.percent_user = num(f[2]);
        m.avg_n_freeze = num(f[3]);
        m.avg_t_freeze = num(f[4]);
        m.freeze_ratio = num(f[5]);
        m.rate_freeze = num(f[6]);
        m.wasted_bw = num(f[7]);
        m.peak_bw = num(f[8]);
        m.sessions_completed = integer(f[9]);
        m.empty = m.sessions_completed == 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

// One run's per-slot ledger, labelled by strategy and repetition.
struct ledger_block {
    std::string strategy;
    std::uint32_t repetition = 0;
    std::vector<slot_ledger> ledgers;
};

inline void write_ledger_csv(std::ostream& out, std::vector<ledger_block> const& blocks) {
    out << "strategy,repetition,slot,arrivals,active,bw_used,bw_wasted,departures\n";
    for (auto const& b : blocks)
        for (auto const& l : b.ledgers)
            out << b.strategy << ',' << b.repetition << ',' << l.slot << ',' << l.arrivals << ',' << l.active << ','
                << format_number(l.bw_used) << ','
                << format_number(l.bw_wasted) << ',' << l.departures << '\n';
}

} // namespace smartstream
