#pragma once

// Slotted streaming simulation.
//
// Each slot runs, in order: arrivals, allocation, download, playback and
// freeze transitions, departures. One slot is one second. Content is measured
// in seconds of video (a buffer of b seconds holds b * bitrate of data).
//
// Departure targets count viewed content, not wall time, so a frozen viewer
// departs later in wall time than one playing smoothly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arrivals.hpp"
#include "behavior_model.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "strategy.hpp"

namespace smartstream {

enum class playback_model { freeze, skip };

struct sim_config {
    double bitrate = 1.0;          // Mb/s
    std::size_t video_length = 300; // slots
    double access_cap = 2.0;       // Mb/s
    double server_capacity = 1000.0; // Mb/s, or unlimited_capacity
    double startup_threshold = 2.0;  // seconds buffered before playback starts
    double rebuffer_threshold = 2.0; // seconds buffered to leave a freeze
    double freeze_trigger = 0.0;     // playback may not draw the buffer below this
    playback_model playback = playback_model::freeze;
    std::uint64_t seed = 12345;
    std::size_t duration = 0; // slots
    // Sessions arriving and slots before this are excluded from metrics.
    // Defaults to two video lengths.
    std::optional<std::size_t> warmup;

    std::size_t warmup_slots() const { return warmup.value_or(2 * video_length); }

    void validate() const {
        if (!(bitrate > 0.0)) throw invalid_input("bitrate must be positive");
        if (video_length == 0) throw invalid_input("video length must be positive");
        if (!(access_cap > 0.0)) throw invalid_input("access cap must be positive");
        if (!(server_capacity >= 0.0)) throw invalid_input("server capacity must be nonnegative");
        if (!(startup_threshold >= 0.0) || !(rebuffer_threshold >= 0.0) || !(freeze_trigger >= 0.0))
            throw invalid_input("buffer thresholds must be nonnegative");
        if (rebuffer_threshold < freeze_trigger)
            throw invalid_input("rebuffer threshold must be at least the freeze trigger");
    }
};

enum class lifecycle { startup, playing, frozen, departed };

struct session_state {
    std::uint64_t id = 0;
    std::int64_t arrival_slot = 0;
    std::size_t departure_target = 0; // slots of content the viewer will watch
    std::size_t playback_point = 0;   // slots of content passed
    double buffer_seconds = 0.0;
    double downloaded_total = 0.0;
    double viewed_seconds = 0.0;  // equals playback_point unless content was skipped
    double skipped_seconds = 0.0;
    lifecycle state = lifecycle::startup;
    std::uint32_t freeze_count = 0;
    std::size_t freeze_slots = 0;
    std::optional<std::int64_t> current_freeze_start;

    // Content position the download has reached, in seconds.
    double download_position() const { return static_cast<double>(playback_point) + buffer_seconds; }
};

// Offered load to arrival rate: rho = lambda * L * bitrate * v / C, where v is
// the mean viewing ratio (1 without early departure).
inline double load_to_arrival_rate(double rho, double capacity, double video_length, double bitrate,
                                   double mean_viewing_ratio) {
    if (!(rho > 0.0 && capacity > 0.0 && video_length > 0.0 && bitrate > 0.0 && mean_viewing_ratio > 0.0))
        throw invalid_input("load conversion inputs must be positive");
    return rho * capacity / (bitrate * video_length * mean_viewing_ratio);
}

// Totals over the measurement window, for steady-state checks.
struct window_totals {
    std::size_t slots = 0;
    double playing_session_slots = 0.0; // sessions attempting playback, summed over slots
    double skipped_seconds = 0.0;
    double bw_used = 0.0;
    double wasted = 0.0;
    double active_session_slots = 0.0;
    // Buffered content across live sessions when the window opened and now.
    double buffered_at_start = 0.0;
    double buffered_now = 0.0;
    // Content viewed locally after a session finished its download and left.
    double local_playout = 0.0;

    // Viewers consuming content per slot, including those playing out a
    // completed download after leaving the server.
    double mean_viewers() const {
        return slots ? (playing_session_slots + local_playout) / static_cast<double>(slots) : 0.0;
    }
    double skip_fraction() const {
        double const opportunities = playing_session_slots + local_playout;
        return opportunities > 0.0 ? skipped_seconds / opportunities : 0.0;
    }
    double mean_bw_used() const { return slots ? bw_used / static_cast<double>(slots) : 0.0; }
    double mean_wasted() const { return slots ? wasted / static_cast<double>(slots) : 0.0; }
    double mean_active() const { return slots ? active_session_slots / static_cast<double>(slots) : 0.0; }
};

class simulation {
public:
    simulation(sim_config config, strategy strat, departure_histogram const& model)
        : config_(std::move(config)), strategy_(std::move(strat)), cdf_(model) {
        config_.validate();
        if (model.bins() != config_.video_length)
            throw invalid_input("departure model has " + std::to_string(model.bins()) +
                                " bins but the video has " + std::to_string(config_.video_length) + " slots");
    }

    void step(std::uint64_t arrivals) {
        slot_ledger ledger{slot_, arrivals, 0, 0.0, 0.0, 0};
        for (std::uint64_t k = 0; k < arrivals; ++k) spawn();

        views_.clear();
        for (auto const& s : sessions_) views_.push_back(view_of(s));
        auto const alloc = strategy_.allocate(views_, config_.server_capacity, config_.bitrate);
        ledger.active = sessions_.size();

        for (std::size_t i = 0; i < sessions_.size(); ++i) {
            double const r = alloc.rates[i];
            sessions_[i].buffer_seconds += r / config_.bitrate;
            sessions_[i].downloaded_total += r;
            ledger.bw_used += r;
        }

        bool const measured = slot_ >= static_cast<std::int64_t>(config_.warmup_slots());
        if (measured && window_.slots == 0) {
            // Buffers as they stood before this slot's download.
            for (std::size_t i = 0; i < sessions_.size(); ++i)
                window_.buffered_at_start += sessions_[i].buffer_seconds - alloc.rates[i] / config_.bitrate;
        }
        for (auto& s : sessions_) advance(s, measured);

        auto keep = sessions_.begin();
        for (auto it = sessions_.begin(); it != sessions_.end(); ++it) {
            if (auto rec = try_depart(*it, measured)) {
                ++ledger.departures;
                ledger.bw_wasted += rec->wasted;
                if (rec->arrival_slot >= static_cast<std::int64_t>(config_.warmup_slots())) {
                    records_.push_back(*rec);
                    totals_.add(*rec);
                }
            } else {
                if (keep != it) *keep = std::move(*it);
                ++keep;
            }
        }
        sessions_.erase(keep, sessions_.end());

        if (measured) {
            window_.buffered_now = 0.0;
            for (auto const& s : sessions_) window_.buffered_now += s.buffer_seconds;
            totals_.add(ledger);
            ++window_.slots;
            window_.bw_used += ledger.bw_used;
            window_.wasted += ledger.bw_wasted;
            window_.active_session_slots += static_cast<double>(ledger.active);
        }
        ledgers_.push_back(ledger);
        ++slot_;
    }

    // Adds a session in an arbitrary state; for driving the engine directly.
    void inject(session_state s) {
        s.id = next_id_++;
        sessions_.push_back(std::move(s));
    }

    std::vector<session_state> const& sessions() const { return sessions_; }
    std::vector<session_record> const& records() const { return records_; }
    std::vector<slot_ledger> const& ledgers() const { return ledgers_; }
    window_totals const& window() const { return window_; }
    metrics_report report() const { return totals_.report(); }
    std::int64_t slot() const { return slot_; }
    sim_config const& config() const { return config_; }

private:
    void spawn() {
        session_state s;
        s.id = next_id_++;
        s.arrival_slot = slot_;
        s.departure_target = sample_departure_slot(cdf_, counter_uniform(config_.seed, stream::departures, s.id));
        sessions_.push_back(s);
    }

    user_view view_of(session_state const& s) const {
        double const L = static_cast<double>(config_.video_length);
        user_view v;
        v.session_id = s.id;
        v.viewing_ratio = static_cast<double>(s.playback_point) / L;
        v.buffer_seconds = s.buffer_seconds;
        v.access_cap = config_.access_cap;
        v.remaining_demand = std::max(0.0, (L - s.download_position()) * config_.bitrate);
        v.in_startup = s.state == lifecycle::startup;
        v.playing = s.state == lifecycle::playing;
        return v;
    }

    void advance(session_state& s, bool measured) {
        constexpr double eps = 1e-9;
        switch (s.state) {
        case lifecycle::startup:
            if (s.buffer_seconds >= config_.startup_threshold - eps || complete(s)) s.state = lifecycle::playing;
            break;
        case lifecycle::frozen:
            ++s.freeze_slots;
            if (s.buffer_seconds >= config_.rebuffer_threshold - eps || complete(s)) {
                s.state = lifecycle::playing;
                s.current_freeze_start.reset();
            }
            break;
        case lifecycle::playing:
            if (measured) window_.playing_session_slots += 1.0;
            if (s.buffer_seconds >= 1.0 + config_.freeze_trigger - eps) {
                s.buffer_seconds = std::max(0.0, s.buffer_seconds - 1.0);
                s.viewed_seconds += 1.0;
                ++s.playback_point;
            } else if (config_.playback == playback_model::skip) {
                double const played = std::min(1.0, s.buffer_seconds);
                s.buffer_seconds -= played;
                s.viewed_seconds += played;
                s.skipped_seconds += 1.0 - played;
                if (measured) window_.skipped_seconds += 1.0 - played;
                ++s.playback_point;
            } else {
                s.state = lifecycle::frozen;
                ++s.freeze_count;
                ++s.freeze_slots;
                s.current_freeze_start = slot_;
            }
            break;
        case lifecycle::departed: break;
        }
    }

    bool complete(session_state const& s) const {
        return s.download_position() >= static_cast<double>(config_.video_length) - 1e-9;
    }

    std::optional<session_record> try_depart(session_state& s, bool measured) {
        bool const reached = s.playback_point >= s.departure_target;
        if (!reached && !complete(s)) return std::nullopt;

        session_record rec;
        rec.session_id = s.id;
        rec.arrival_slot = s.arrival_slot;
        rec.departure_slot = slot_;
        rec.freeze_count = s.freeze_count;
        rec.freeze_seconds = static_cast<double>(s.freeze_slots);
        rec.downloaded = s.downloaded_total;
        double viewed = s.viewed_seconds;
        double played_slots = static_cast<double>(s.playback_point);
        if (!reached) {
            // The whole file is local: the viewer plays on to the departure
            // target without further freezes.
            double const tail = static_cast<double>(s.departure_target - s.playback_point);
            viewed += tail;
            played_slots += tail;
            if (measured) window_.local_playout += tail;
        }
        rec.play_seconds = played_slots;
        rec.wasted = std::max(0.0, s.downloaded_total - viewed * config_.bitrate);
        s.state = lifecycle::departed;
        return rec;
    }

    sim_config config_;
    strategy strategy_;
    viewing_ratio_cdf cdf_;
    std::vector<session_state> sessions_;
    std::vector<user_view> views_;
    std::vector<session_record> records_;
    std::vector<slot_ledger> ledgers_;
    metrics_accumulator totals_;
    window_totals window_;
    std::int64_t slot_ = 0;
    std::uint64_t next_id_ = 0;
};

struct run_result {
    metrics_report report;
    std::vector<slot_ledger> ledgers;
    window_totals window;
};

// Runs `config.duration` slots from an empty system. Arrival counts beyond the
// end of `arrivals` are zero.
inline run_result run(sim_config const& config, strategy const& strat, std::vector<std::uint64_t> const& arrivals,
                      departure_histogram const& model) {
    simulation sim(config, strat, model);
    for (std::size_t t = 0; t < config.duration; ++t) sim.step(t < arrivals.size() ? arrivals[t] : 0);
    return {sim.report(), sim.ledgers(), sim.window()};
}

} // namespace smartstream
