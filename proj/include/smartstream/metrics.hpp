#pragma once

// QoE aggregation over departed sessions.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>

namespace smartstream {

// What a session reports when it leaves.
struct session_record {
    std::uint64_t session_id = 0;
    std::int64_t arrival_slot = 0;
    std::int64_t departure_slot = 0;
    std::uint32_t freeze_count = 0;
    double freeze_seconds = 0.0;
    // Content actually watched, in seconds; session time is play + freeze.
    double play_seconds = 0.0;
    double downloaded = 0.0; // rate * seconds
    double wasted = 0.0;     // downloaded but never viewed
};

struct slot_ledger {
    std::int64_t slot = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t active = 0;
    double bw_used = 0.0;
    double bw_wasted = 0.0;
    std::uint64_t departures = 0;
};

struct metrics_report {
    double percent_user = 0.0;
    double avg_n_freeze = 0.0;
    double avg_t_freeze = 0.0;
    double freeze_ratio = 0.0;
    double rate_freeze = 0.0; // freezes per minute of session time
    double wasted_bw = 0.0;
    double peak_bw = 0.0;
    std::uint64_t sessions_completed = 0;
    // Set when no session departed; every ratio is then reported as zero.
    bool empty = true;
};

// Additive sufficient statistics, so partial aggregates over disjoint session
// sets (or slot ranges) can be merged.
struct metrics_accumulator {
    std::uint64_t sessions = 0;
    std::uint64_t sessions_with_freeze = 0;
    std::uint64_t freezes = 0;
    double freeze_seconds = 0.0;
    double session_seconds = 0.0;
    double wasted = 0.0;
    double peak_bw = 0.0;

    void add(session_record const& s) {
        ++sessions;
        if (s.freeze_count > 0) ++sessions_with_freeze;
        freezes += s.freeze_count;
        freeze_seconds += s.freeze_seconds;
        session_seconds += s.play_seconds + s.freeze_seconds;
        wasted += s.wasted;
    }

    void add(slot_ledger const& l) { peak_bw = std::max(peak_bw, l.bw_used); }

    metrics_accumulator& merge(metrics_accumulator const& o) {
        sessions += o.sessions;
        sessions_with_freeze += o.sessions_with_freeze;
        freezes += o.freezes;
        freeze_seconds += o.freeze_seconds;
        session_seconds += o.session_seconds;
        wasted += o.wasted;
        peak_bw = std::max(peak_bw, o.peak_bw);
        return *this;
    }

    metrics_report report() const {
        metrics_report r;
        r.wasted_bw = wasted;
        r.peak_bw = peak_bw;
        r.sessions_completed = sessions;
        r.empty = sessions == 0;
        if (r.empty) return r;
        double const n = static_cast<double>(sessions);
        r.percent_user = static_cast<double>(sessions_with_freeze) / n;
        r.avg_n_freeze = static_cast<double>(freezes) / n;
        r.avg_t_freeze = freeze_seconds / n;
        if (session_seconds > 0.0) {
            r.freeze_ratio = freeze_seconds / session_seconds;
            r.rate_freeze = static_cast<double>(freezes) / (session_seconds / 60.0);
        }
        return r;
    }
};

// Sessions must all have departed; live sessions are the caller's to exclude.
inline metrics_report aggregate(std::span<session_record const> sessions, std::span<slot_ledger const> ledgers) {
    metrics_accumulator acc;
    for (auto const& s : sessions) acc.add(s);
    for (auto const& l : ledgers) acc.add(l);
    return acc.report();
}

} // namespace smartstream
