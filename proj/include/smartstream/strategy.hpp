#pragma once

// Per-slot bandwidth allocation strategies.
//
//   sc / sc+  rate-controlled at bitrate * (1 + delta)
//   be        best effort, max-min fair up to each user's cap
//   eb        equalize projected buffers
//   ew        equalize projected buffer * departure rate
//   bb        browsing-phase users at the bitrate, everyone else best effort
//
// Users still filling their startup buffer are always served best effort:
// their demand is min(access cap, remaining file).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "behavior_model.hpp"
#include "errors.hpp"
#include "water_filling.hpp"

namespace smartstream {

inline constexpr double unlimited_capacity = std::numeric_limits<double>::infinity();

struct user_view {
    std::uint64_t session_id = 0;
    double viewing_ratio = 0.0;
    double buffer_seconds = 0.0;
    double access_cap = 0.0;
    // Most that is still useful this slot: remaining file / slot length.
    double remaining_demand = 0.0;
    bool in_startup = false;
    // Consumes one slot of buffer this slot (false for startup and frozen).
    bool playing = false;

    double best_effort_demand() const { return std::max(0.0, std::min(access_cap, remaining_demand)); }
};

// rates[i] belongs to users[i].
struct allocation {
    std::vector<double> rates;

    double total() const {
        double s = 0.0;
        for (double r : rates) s += r;
        return s;
    }
};

inline allocation allocate_be(std::vector<user_view> const& users, double capacity) {
    std::vector<double> demand(users.size());
    std::transform(users.begin(), users.end(), demand.begin(), [](auto const& u) { return u.best_effort_demand(); });
    return {max_min_fill(demand, capacity).rates};
}

inline allocation allocate_sc(std::vector<user_view> const& users, double capacity, double bitrate, double delta) {
    if (delta < 0.0) throw invalid_input("rate control delta must be nonnegative");
    double const target = bitrate * (1.0 + delta);
    std::vector<double> demand(users.size());
    std::transform(users.begin(), users.end(), demand.begin(), [&](auto const& u) {
        return u.in_startup ? u.best_effort_demand() : std::min(target, u.best_effort_demand());
    });
    return {max_min_fill(demand, capacity).rates};
}

namespace detail {

inline double projected_base(user_view const& u) { return u.buffer_seconds - (u.playing ? 1.0 : 0.0); }

// Level-fills the users selected by `members` with the given weights.
inline void level_fill_subset(std::vector<user_view> const& users, std::vector<std::size_t> const& members,
                              std::vector<double> const& weights, double capacity, double bitrate,
                              std::vector<double>& rates) {
    std::vector<double> base, caps;
    base.reserve(members.size());
    caps.reserve(members.size());
    for (auto i : members) {
        base.push_back(projected_base(users[i]));
        caps.push_back(users[i].best_effort_demand());
    }
    auto filled = level_fill(base, weights, caps, capacity, bitrate);
    for (std::size_t k = 0; k < members.size(); ++k) rates[members[k]] = filled.rates[k];
}

} // namespace detail

inline allocation allocate_eb(std::vector<user_view> const& users, double capacity, double bitrate) {
    if (!(bitrate > 0.0)) throw invalid_input("bitrate must be positive");
    std::vector<std::size_t> all(users.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    allocation out{std::vector<double>(users.size(), 0.0)};
    detail::level_fill_subset(users, all, std::vector<double>(users.size(), 1.0), capacity, bitrate, out.rates);
    return out;
}

// Users with a positive departure rate are leveled on f(v)*b' first; users
// with f(v) = 0 share whatever is left, buffer-equalized.
template <typename RateFn>
allocation allocate_ew(std::vector<user_view> const& users, double capacity, double bitrate, RateFn const& f) {
    if (!(bitrate > 0.0)) throw invalid_input("bitrate must be positive");
    std::vector<double> hazard(users.size());
    double max_hazard = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        hazard[i] = f(users[i].viewing_ratio);
        if (!(hazard[i] >= 0.0 && hazard[i] <= 1.0)) throw invalid_input("departure rate outside [0,1]");
        max_hazard = std::max(max_hazard, hazard[i]);
    }

    std::vector<std::size_t> positive, zero;
    std::vector<double> weights;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (hazard[i] > 0.0) {
            positive.push_back(i);
            // Normalized to (0,1]; a constant f gives weights of exactly 1.
            weights.push_back(hazard[i] / max_hazard);
        } else {
            zero.push_back(i);
        }
    }

    allocation out{std::vector<double>(users.size(), 0.0)};
    detail::level_fill_subset(users, positive, weights, capacity, bitrate, out.rates);
    double const used = out.total();
    if (!zero.empty())
        detail::level_fill_subset(users, zero, std::vector<double>(zero.size(), 1.0), capacity - used, bitrate,
                                  out.rates);
    return out;
}

inline allocation allocate_bb(std::vector<user_view> const& users, double capacity, double bitrate,
                              phase_boundary boundary) {
    if (!(boundary.boundary_ratio >= 0.0 && boundary.boundary_ratio <= 1.0))
        throw invalid_input("phase boundary must lie in [0,1]");

    std::vector<std::size_t> browsing, rest;
    for (std::size_t i = 0; i < users.size(); ++i) {
        if (!users[i].in_startup && users[i].viewing_ratio < boundary.boundary_ratio)
            browsing.push_back(i);
        else
            rest.push_back(i);
    }
    if (browsing.empty()) return allocate_be(users, capacity);

    std::vector<double> browse_demand, rest_demand;
    for (auto i : browsing) browse_demand.push_back(std::min(bitrate, users[i].best_effort_demand()));
    for (auto i : rest) rest_demand.push_back(users[i].best_effort_demand());

    auto reserved = max_min_fill(browse_demand, capacity);
    double const reserved_total = std::accumulate(reserved.rates.begin(), reserved.rates.end(), 0.0);
    auto shared = max_min_fill(rest_demand, capacity - reserved_total);

    // Browsing users must not out-pace viewing users.
    if (!rest.empty() && shared.level < bitrate) return allocate_be(users, capacity);

    allocation out{std::vector<double>(users.size(), 0.0)};
    for (std::size_t k = 0; k < browsing.size(); ++k) out.rates[browsing[k]] = reserved.rates[k];
    for (std::size_t k = 0; k < rest.size(); ++k) out.rates[rest[k]] = shared.rates[k];

    // Capacity left once every viewing user is capped tops up browsing users.
    double const spare = capacity - reserved_total -
                         std::accumulate(shared.rates.begin(), shared.rates.end(), 0.0);
    if (spare > 0.0 && spare < unlimited_capacity) {
        std::vector<double> headroom;
        for (std::size_t k = 0; k < browsing.size(); ++k)
            headroom.push_back(users[browsing[k]].best_effort_demand() - reserved.rates[k]);
        auto extra = max_min_fill(headroom, spare);
        for (std::size_t k = 0; k < browsing.size(); ++k) out.rates[browsing[k]] += extra.rates[k];
    }
    return out;
}

enum class strategy_kind { sc, sc_plus, be, eb, ew, bb };

inline constexpr double sc_plus_delta = 0.05;

inline std::string_view to_string(strategy_kind k) {
    switch (k) {
    case strategy_kind::sc: return "sc";
    case strategy_kind::sc_plus: return "sc+";
    case strategy_kind::be: return "be";
    case strategy_kind::eb: return "eb";
    case strategy_kind::ew: return "ew";
    case strategy_kind::bb: return "bb";
    }
    return "?";
}

inline std::optional<strategy_kind> parse_strategy(std::string_view name) {
    for (auto k : {strategy_kind::sc, strategy_kind::sc_plus, strategy_kind::be, strategy_kind::eb,
                   strategy_kind::ew, strategy_kind::bb})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

// A strategy together with the behavior knowledge it needs.
struct strategy {
    strategy_kind kind = strategy_kind::be;
    double delta = 0.0;
    phase_boundary boundary{};
    std::optional<departure_rate_fn> rate_fn;

    allocation allocate(std::vector<user_view> const& users, double capacity, double bitrate) const {
        switch (kind) {
        case strategy_kind::sc: return allocate_sc(users, capacity, bitrate, 0.0);
        case strategy_kind::sc_plus: return allocate_sc(users, capacity, bitrate, delta);
        case strategy_kind::be: return allocate_be(users, capacity);
        case strategy_kind::eb: return allocate_eb(users, capacity, bitrate);
        case strategy_kind::ew:
            if (!rate_fn) throw invalid_input("ew needs a departure rate function");
            return allocate_ew(users, capacity, bitrate, *rate_fn);
        case strategy_kind::bb: return allocate_bb(users, capacity, bitrate, boundary);
        }
        return {};
    }
};

// Builds a strategy from a departure model: bb gets the model's phase
// boundary, ew its hazard function.
inline strategy make_strategy(strategy_kind kind, departure_rates const& rates) {
    strategy s;
    s.kind = kind;
    s.delta = kind == strategy_kind::sc_plus ? sc_plus_delta : 0.0;
    s.boundary = find_phase_boundary(rates);
    s.rate_fn.emplace(rates);
    return s;
}

} // namespace smartstream
