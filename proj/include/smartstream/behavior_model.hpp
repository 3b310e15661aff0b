#pragma once

// Viewer early-departure behavior.
//
// A departure distribution over a video of L slots has three equivalent
// representations:
//
//   departure_histogram  q[t]  probability a viewer leaves during viewed slot t
//   departure_rates      p[t]  probability of leaving in slot t given the
//                              viewer has watched the preceding slots
//   viewing_ratio_cdf    c[t]  = q[0] + ... + q[t]
//
// related by q[t] = p[t] * prod_{i<t} (1 - p[i]). Index 0 is the first slot of
// content. The last bin carries the completion mass, so p[L-1] = 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "text_io.hpp"

namespace smartstream {

inline constexpr double mass_tolerance = 1e-9;

class departure_histogram {
public:
    explicit departure_histogram(std::vector<double> q) : q_(std::move(q)) {
        if (q_.empty()) throw invalid_input("departure histogram needs at least one bin");
        double sum = 0;
        for (std::size_t t = 0; t < q_.size(); ++t) {
            if (!(q_[t] >= 0.0 && q_[t] <= 1.0))
                throw invalid_input("departure histogram bin " + std::to_string(t + 1) + " outside [0,1]");
            sum += q_[t];
        }
        if (std::abs(sum - 1.0) > mass_tolerance)
            throw invalid_input("departure histogram mass sums to " + std::to_string(sum) + ", expected 1");
    }

    std::span<double const> q() const { return q_; }
    std::size_t bins() const { return q_.size(); }
    double operator[](std::size_t t) const { return q_[t]; }

private:
    std::vector<double> q_;
};

class departure_rates {
public:
    explicit departure_rates(std::vector<double> p) : p_(std::move(p)) {
        if (p_.empty()) throw invalid_input("departure rates need at least one slot");
        for (std::size_t t = 0; t < p_.size(); ++t)
            if (!(p_[t] >= 0.0 && p_[t] <= 1.0))
                throw invalid_input("departure rate at slot " + std::to_string(t + 1) + " outside [0,1]");
        if (std::abs(p_.back() - 1.0) > mass_tolerance)
            throw invalid_input("final departure rate must be 1");
    }

    std::span<double const> p() const { return p_; }
    std::size_t bins() const { return p_.size(); }
    double operator[](std::size_t t) const { return p_[t]; }

private:
    std::vector<double> p_;
};

class viewing_ratio_cdf {
public:
    explicit viewing_ratio_cdf(departure_histogram const& h) : cdf_(h.bins()) {
        std::partial_sum(h.q().begin(), h.q().end(), cdf_.begin());
    }

    explicit viewing_ratio_cdf(std::vector<double> cdf) : cdf_(std::move(cdf)) {
        if (cdf_.empty()) throw invalid_input("empty cdf");
        if (!std::is_sorted(cdf_.begin(), cdf_.end()) || cdf_.front() < 0.0)
            throw invalid_input("cdf must be nondecreasing and nonnegative");
        if (std::abs(cdf_.back() - 1.0) > mass_tolerance) throw invalid_input("cdf must end at 1");
    }

    std::span<double const> values() const { return cdf_; }
    std::size_t bins() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

struct phase_boundary {
    double boundary_ratio = 0.0;
};

// Hazard rates from departure mass. Slots nobody can reach get rate 0.
inline departure_rates rates_from_histogram(departure_histogram const& h) {
    std::vector<double> p(h.bins());
    double survivors = 1.0;
    for (std::size_t t = 0; t < h.bins(); ++t) {
        if (survivors < -mass_tolerance) throw invalid_input("malformed histogram: negative survivor mass");
        p[t] = survivors > 0.0 ? std::clamp(h[t] / survivors, 0.0, 1.0) : 0.0;
        survivors -= h[t];
    }
    // Whatever survives to the last slot leaves there.
    p.back() = 1.0;
    return departure_rates(std::move(p));
}

inline departure_histogram histogram_from_rates(departure_rates const& r) {
    std::vector<double> q(r.bins());
    double survival = 1.0;
    for (std::size_t t = 0; t < r.bins(); ++t) {
        q[t] = r[t] * survival;
        survival *= 1.0 - r[t];
    }
    return departure_histogram(std::move(q));
}

// Inverse-transform sampling. Returns the number of content slots the viewer
// watches before leaving, in [1, bins].
inline std::size_t sample_departure_slot(viewing_ratio_cdf const& cdf, double u) {
    auto values = cdf.values();
    auto it = std::upper_bound(values.begin(), values.end(), u);
    if (it == values.end()) return values.size();
    return static_cast<std::size_t>(it - values.begin()) + 1;
}

namespace detail {

// Latest slot (1-based) among the top hazards covering `mass_fraction` of
// their sum; 0 if the rates are all zero.
inline std::size_t top_hazard_extent(std::span<double const> p, double mass_fraction) {
    if (!(mass_fraction > 0.0 && mass_fraction < 1.0))
        throw invalid_input("phase boundary mass fraction must lie in (0,1)");
    double const total = std::accumulate(p.begin(), p.end(), 0.0);
    if (p.empty() || total <= 0.0) return 0;

    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] > p[b]; });

    double selected = 0.0;
    std::size_t last_slot = 0;
    for (auto t : order) {
        selected += p[t];
        last_slot = std::max(last_slot, t + 1);
        if (selected >= mass_fraction * total) break;
    }
    return last_slot;
}

} // namespace detail

// Browsing/viewing demarcation over a plain list of hazard rates: the highest
// rates that together make up `mass_fraction` of the total belong to the
// browsing phase; the boundary is the latest of them over the list length.
inline phase_boundary find_phase_boundary(std::span<double const> hazards, double mass_fraction = 0.5) {
    if (hazards.empty()) throw invalid_input("phase boundary needs at least one rate");
    auto const extent = detail::top_hazard_extent(hazards, mass_fraction);
    return {static_cast<double>(extent) / static_cast<double>(hazards.size())};
}

// Same, for a departure model. The final (completion) slot never counts, but
// the ratio is still taken over the full video length.
inline phase_boundary find_phase_boundary(departure_rates const& r, double mass_fraction = 0.5) {
    auto p = r.p();
    auto const extent = detail::top_hazard_extent(p.first(p.size() - 1), mass_fraction);
    return {static_cast<double>(extent) / static_cast<double>(p.size())};
}

// Mean viewing ratio: sum over slots of (t+1)/L * q[t].
inline double mean_viewing_ratio(departure_histogram const& h) {
    double acc = 0.0;
    for (std::size_t t = 0; t < h.bins(); ++t) acc += static_cast<double>(t + 1) * h[t];
    return acc / static_cast<double>(h.bins());
}

struct synthetic_params {
    std::size_t slots = 300;
    double browse_mass = 0.45;
    double browse_width = 0.15;
    double complete_mass = 0.35;
    // Weight of the last browsing slot relative to the first.
    double browse_decay = 0.6;
};

// Stand-in departure shape: a geometrically decaying burst of departures over
// the first browse_width of the video, a flat middle, and a completion spike
// on the final slot.
inline departure_histogram synthetic_model(synthetic_params const& sp) {
    auto const L = sp.slots;
    if (L == 0) throw invalid_input("synthetic model needs at least one slot");
    if (!(sp.browse_mass >= 0.0 && sp.complete_mass >= 0.0 &&
          sp.browse_mass + sp.complete_mass <= 1.0 + mass_tolerance))
        throw invalid_input("infeasible mass split: browse and completion masses must be nonnegative with sum <= 1");
    if (!(sp.browse_width > 0.0 && sp.browse_width < 1.0))
        throw invalid_input("browse width must lie in (0,1)");
    if (!(sp.browse_decay > 0.0 && sp.browse_decay <= 1.0))
        throw invalid_input("browse decay must lie in (0,1]");

    std::vector<double> q(L, 0.0);
    double const remainder = std::max(0.0, 1.0 - sp.browse_mass - sp.complete_mass);
    if (L == 1) {
        q[0] = 1.0;
        return departure_histogram(std::move(q));
    }

    auto browse_slots = static_cast<std::size_t>(std::lround(sp.browse_width * static_cast<double>(L)));
    browse_slots = std::clamp<std::size_t>(browse_slots, 1, L - 1);
    std::size_t const middle_slots = L - 1 - browse_slots;
    if (middle_slots == 0 && remainder > mass_tolerance)
        throw invalid_input("infeasible mass split: no middle slots for the remaining mass");

    if (sp.browse_mass > 0.0) {
        double const ratio =
            browse_slots > 1 ? std::pow(sp.browse_decay, 1.0 / static_cast<double>(browse_slots - 1)) : 1.0;
        std::vector<double> w(browse_slots);
        double wsum = 0.0;
        for (std::size_t t = 0; t < browse_slots; ++t) wsum += (w[t] = std::pow(ratio, static_cast<double>(t)));
        for (std::size_t t = 0; t < browse_slots; ++t) q[t] = sp.browse_mass * w[t] / wsum;
    }
    for (std::size_t t = browse_slots; t < L - 1; ++t) q[t] = remainder / static_cast<double>(middle_slots);
    q[L - 1] = sp.complete_mass;
    if (middle_slots == 0) q[L - 1] += remainder;
    return departure_histogram(std::move(q));
}

// Piecewise-constant hazard lookup f(v) over viewing ratio.
class departure_rate_fn {
public:
    explicit departure_rate_fn(departure_rates r) : rates_(std::move(r)) {}

    double operator()(double viewing_ratio) const {
        auto const L = rates_.bins();
        auto bin = static_cast<std::size_t>(std::max(0.0, std::floor(viewing_ratio * static_cast<double>(L))));
        return rates_[std::min(bin, L - 1)];
    }

    departure_rates const& rates() const { return rates_; }

private:
    departure_rates rates_;
};

// Histogram files: one `bin_index,probability` row per bin, bin_index counting
// from 1, `#` comments allowed.
inline departure_histogram load_histogram(std::string const& path) {
    std::vector<double> q;
    for (auto const& line : text::read_lines(path)) {
        auto fields = text::split(line.text, ',');
        if (fields.size() != 2) throw parse_error(path, line.number, "expected `bin_index,probability`");
        auto idx = text::to_int(fields[0]);
        auto prob = text::to_double(fields[1]);
        if (!idx || !prob) throw parse_error(path, line.number, "malformed number");
        if (*idx != static_cast<std::int64_t>(q.size()) + 1)
            throw parse_error(path, line.number, "bin indices must be consecutive starting at 1");
        q.push_back(*prob);
    }
    try {
        return departure_histogram(std::move(q));
    } catch (invalid_input const& e) {
        throw invalid_input(path + ": " + e.what());
    }
}

inline void save_histogram(departure_histogram const& h, std::string const& path) {
    std::ofstream out(path);
    if (!out) throw invalid_input("cannot write '" + path + "'");
    out << "# bin_index,probability\n";
    char buf[64];
    for (std::size_t t = 0; t < h.bins(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", t + 1, h[t]);
        out << buf;
    }
}

} // namespace smartstream
