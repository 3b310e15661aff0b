#pragma once

// Water-filling primitives used by every allocation strategy.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace smartstream {

struct fill_result {
    std::vector<double> rates;
    // Common share given to every unsaturated user; +inf when all demands fit.
    double level = std::numeric_limits<double>::infinity();
};

// Max-min fair division of `capacity` among users with the given demand caps:
// every unsaturated user gets the same share until its cap binds.
inline fill_result max_min_fill(std::span<double const> demands, double capacity) {
    std::size_t const n = demands.size();
    fill_result out{std::vector<double>(n, 0.0), std::numeric_limits<double>::infinity()};
    if (n == 0) return out;
    capacity = std::max(0.0, capacity);

    double const total = std::accumulate(demands.begin(), demands.end(), 0.0);
    if (total <= capacity) {
        std::copy(demands.begin(), demands.end(), out.rates.begin());
        return out;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return demands[a] < demands[b]; });

    double remaining = capacity;
    std::size_t k = 0;
    for (; k < n; ++k) {
        double const share = remaining / static_cast<double>(n - k);
        double const d = demands[order[k]];
        if (d > share) break;
        out.rates[order[k]] = d;
        remaining -= d;
    }
    double const share = std::max(0.0, remaining / static_cast<double>(n - k));
    for (std::size_t j = k; j < n; ++j) out.rates[order[j]] = share;
    out.level = share;
    return out;
}

// Weighted level filling over projected buffers.
//
// User i starts from projected buffer `base[i]` (seconds) and gains
// rate/bitrate seconds from its allocation, capped at `caps[i]`. The fill
// raises a common level t and gives user i the projected buffer t / weight[i],
// i.e. it equalizes weight[i] * buffer[i]. Weights must lie in (0, 1]; with all
// weights equal to 1 this equalizes the buffers themselves.
inline fill_result level_fill(std::span<double const> base, std::span<double const> weights,
                              std::span<double const> caps, double capacity, double bitrate) {
    std::size_t const n = base.size();
    fill_result out{std::vector<double>(n, 0.0), std::numeric_limits<double>::infinity()};
    if (n == 0) return out;
    capacity = std::max(0.0, capacity);

    double const total = std::accumulate(caps.begin(), caps.end(), 0.0);
    if (total <= capacity) {
        std::copy(caps.begin(), caps.end(), out.rates.begin());
        return out;
    }

    auto rate_at = [&](std::size_t i, double t) {
        return std::clamp((t / weights[i] - base[i]) * bitrate, 0.0, caps[i]);
    };

    // Allocated total is piecewise linear in t with kinks where a user starts
    // receiving bandwidth (t = w*base) and where its cap binds.
    struct kink {
        double t;
        double slope_delta;
        double offset_delta;
    };
    std::vector<kink> kinks;
    kinks.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (caps[i] <= 0.0) continue;
        double const slope = bitrate / weights[i];
        double const start = weights[i] * base[i];
        double const stop = weights[i] * (base[i] + caps[i] / bitrate);
        // Active section contributes slope*t - base*bitrate; saturated adds cap.
        kinks.push_back({start, slope, -base[i] * bitrate});
        kinks.push_back({stop, -slope, base[i] * bitrate + caps[i]});
    }
    std::stable_sort(kinks.begin(), kinks.end(), [](kink const& a, kink const& b) { return a.t < b.t; });

    double slope = 0.0, offset = 0.0;
    double level = kinks.empty() ? 0.0 : kinks.front().t;
    for (std::size_t k = 0; k < kinks.size();) {
        double const t0 = kinks[k].t;
        for (; k < kinks.size() && kinks[k].t == t0; ++k) {
            slope += kinks[k].slope_delta;
            offset += kinks[k].offset_delta;
        }
        double const next_t = k < kinks.size() ? kinks[k].t : std::numeric_limits<double>::infinity();
        double const at_next = slope * next_t + offset;
        if (slope > 0.0 && at_next >= capacity) {
            level = (capacity - offset) / slope;
            break;
        }
        level = next_t;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += (out.rates[i] = rate_at(i, level));
    // Rounding in the solve can overshoot by a few ulps.
    if (sum > capacity && sum > 0.0) {
        double const scale = capacity / sum;
        for (auto& r : out.rates) r *= scale;
    }
    out.level = level;
    return out;
}

} // namespace smartstream
