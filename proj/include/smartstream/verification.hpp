#pragma once

// Finite-instance checks of the steady-state claims, as run by `verify`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "arrivals.hpp"
#include "behavior_model.hpp"
#include "sim_engine.hpp"
#include "steady_state.hpp"
#include "strategy.hpp"

namespace smartstream {

struct claim_result {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline std::string printf_string(char const* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

inline std::size_t uniform_index(rng& gen, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(gen.uniform() * static_cast<double>(hi - lo + 1));
}

} // namespace detail

struct wastage_check {
    double measured = 0.0;  // W, per slot
    double predicted = 0.0; // C - N + N*gamma
    double capacity = 0.0;  // mean bandwidth used per slot
    double viewers = 0.0;
    double skip_fraction = 0.0;

    double relative_error() const { return capacity > 0.0 ? std::abs(measured - predicted) / capacity : 0.0; }
};

// Runs a skip-mode simulation and compares the measured wastage rate with the
// steady-state identity. C is the bandwidth actually delivered per slot.
inline wastage_check check_wastage_identity(sim_config config, strategy const& strat, departure_histogram const& model,
                                            double rho) {
    config.playback = playback_model::skip;
    double const lambda = load_to_arrival_rate(rho, config.server_capacity, static_cast<double>(config.video_length),
                                               config.bitrate, mean_viewing_ratio(model));
    auto const arrivals = realize(poisson_arrivals{lambda}, config.duration, config.seed);
    auto const res = run(config, strat, arrivals, model);
    auto const& w = res.window;
    wastage_check out;
    out.measured = w.mean_wasted() / config.bitrate;
    out.capacity = w.mean_bw_used() / config.bitrate;
    out.viewers = w.mean_viewers();
    out.skip_fraction = w.skip_fraction();
    out.predicted = wastage_identity(out.capacity, out.viewers, out.skip_fraction);
    return out;
}

inline claim_result verify_wastage_identity(std::uint64_t seed, double tolerance = 0.02) {
    sim_config c;
    c.seed = seed;
    c.duration = 3600;
    c.warmup = 2 * c.video_length;
    auto const model = synthetic_model({});
    auto const rates = rates_from_histogram(model);
    claim_result out{"wastage identity (skip mode, heavy load)", true, {}};
    for (auto k : {strategy_kind::sc, strategy_kind::be, strategy_kind::eb, strategy_kind::bb}) {
        auto const chk = check_wastage_identity(c, make_strategy(k, rates), model, 0.995);
        bool const ok = chk.relative_error() <= tolerance;
        out.passed = out.passed && ok;
        out.detail += detail::printf_string("%s: W=%.3f predicted=%.3f err=%.4f; ", std::string(to_string(k)).c_str(),
                                            chk.measured, chk.predicted, chk.relative_error());
    }
    return out;
}

// Unconstrained skip minimization puts every user at the same buffer.
inline claim_result verify_equal_buffers(std::uint64_t seed, std::size_t cases = 50, double grid = 0.25) {
    rng gen(seed, stream::verification);
    std::size_t failures = 0;
    for (std::size_t k = 0; k < cases; ++k) {
        auto const g = random_convex_skip_fn(gen);
        auto const users = detail::uniform_index(gen, 1, 4);
        double const total = static_cast<double>(detail::uniform_index(gen, 0, 32)) * grid; // S <= 8
        auto const best = brute_force_min_skip(users, total, g, grid);
        auto [lo, hi] = std::minmax_element(best.buffers.begin(), best.buffers.end());
        if (*hi - *lo > grid + 1e-9) ++failures;
    }
    return {"equal buffers minimize skipping", failures == 0,
            detail::printf_string("%zu/%zu cases equal within %.2f", cases - failures, cases, grid)};
}

// Minimizing the largest waste rate equalizes f_i * b_i among users holding
// content.
inline claim_result verify_equal_waste_rates(std::uint64_t seed, std::size_t cases = 50, double grid = 0.25) {
    rng gen(seed, stream::verification);
    gen.uniform();
    std::size_t failures = 0;
    for (std::size_t k = 0; k < cases; ++k) {
        auto const users = detail::uniform_index(gen, 1, 4);
        std::vector<double> f(users);
        for (auto& x : f) x = 0.05 + 0.95 * gen.uniform();
        double const total = static_cast<double>(detail::uniform_index(gen, 0, 32)) * grid;
        auto const best = brute_force_min_waste(f, total, grid);
        double const fmax = *std::max_element(f.begin(), f.end());
        bool ok = true;
        for (std::size_t i = 0; i < users; ++i)
            for (std::size_t j = 0; j < users; ++j)
                if (best.buffers[i] > 0.0 && best.buffers[j] > 0.0 &&
                    std::abs(f[i] * best.buffers[i] - f[j] * best.buffers[j]) > grid * fmax + 1e-9)
                    ok = false;
        if (!ok) ++failures;
    }
    return {"equal waste rates minimize the peak waste rate", failures == 0,
            detail::printf_string("%zu/%zu cases equal within grid*max f", cases - failures, cases)};
}

// Skip minimization under a fixed wastage budget satisfies
// g'(b_i)/g'(b_j) = f_i/f_j.
inline claim_result verify_lagrange_condition(std::uint64_t seed, std::size_t cases = 50, double grid = 0.1) {
    rng gen(seed, stream::verification);
    gen.uniform();
    gen.uniform();
    std::size_t failures = 0, indeterminate = 0;
    for (std::size_t k = 0; k < cases; ++k) {
        auto const g = random_convex_skip_fn(gen);
        auto const users = detail::uniform_index(gen, 2, 3);
        std::vector<double> f(users);
        for (auto& x : f) x = 0.1 + 0.2 * gen.uniform();
        double wastage = 0.0;
        for (double x : f) wastage += x * (3.0 + 2.0 * gen.uniform());
        auto const best = constrained_min_skip(f, wastage, g, grid);
        auto const ok = lagrange_condition_check(best.buffers, f, g, 10.0 * grid, grid / 10.0);
        if (!ok) ++indeterminate;
        else if (!*ok) ++failures;
    }
    return {"constrained optimum meets the Lagrange condition", failures == 0 && indeterminate == 0,
            detail::printf_string("%zu/%zu pass, %zu indeterminate", cases - failures - indeterminate, cases,
                                  indeterminate)};
}

inline std::vector<claim_result> verify_all(std::uint64_t seed) {
    return {verify_wastage_identity(seed), verify_equal_buffers(seed), verify_equal_waste_rates(seed),
            verify_lagrange_condition(seed)};
}

} // namespace smartstream
