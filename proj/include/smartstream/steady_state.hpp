#pragma once

// Exhaustive small-instance oracles for the steady-state buffer analysis.
//
// These are deliberately naive grid searches. They share no code with the
// allocators they are used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace smartstream {

// Skip probability as a function of buffered seconds. Expected to be convex
// and nonincreasing; `check_shape` verifies that on a grid.
class skip_prob_fn {
public:
    explicit skip_prob_fn(std::function<double(double)> g) : g_(std::move(g)) {}

    // g(b) = g0 * 2^-b
    static skip_prob_fn exponential(double g0 = 1.0) {
        if (!(g0 > 0.0 && g0 <= 1.0)) throw invalid_input("g0 must lie in (0,1]");
        return skip_prob_fn([g0](double b) { return g0 * std::exp2(-b); });
    }

    double operator()(double b) const { return g_(b); }

    // Central-difference derivative.
    double derivative(double b, double h) const { return (g_(b + h) - g_(b - h)) / (2.0 * h); }

    bool check_shape(double max_b, double h) const {
        for (double b = h; b + h <= max_b + 1e-12; b += h) {
            double const lo = g_(b - h), mid = g_(b), hi = g_(b + h);
            if (lo + hi < 2.0 * mid - 1e-12) return false;
            if (hi > mid + 1e-12 || mid > lo + 1e-12) return false;
            if (mid < 0.0 || mid > 1.0) return false;
        }
        return true;
    }

private:
    std::function<double(double)> g_;
};

// A strictly convex, decreasing mixture of exponentials with values in (0,1].
inline skip_prob_fn random_convex_skip_fn(rng& gen) {
    std::size_t const terms = 1 + static_cast<std::size_t>(gen.uniform() * 3.0);
    std::vector<double> weight(terms), decay(terms);
    double total = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
        weight[k] = 0.1 + gen.uniform();
        decay[k] = 0.3 + 1.7 * gen.uniform();
        total += weight[k];
    }
    for (auto& w : weight) w /= total;
    return skip_prob_fn([weight, decay](double b) {
        double g = 0.0;
        for (std::size_t k = 0; k < weight.size(); ++k) g += weight[k] * std::exp(-decay[k] * b);
        return g;
    });
}

// Steady-state balance under heavy load: W = C - N + N * gamma.
inline double wastage_identity(double capacity, double viewers, double skip_fraction) {
    if (!(skip_fraction >= 0.0 && skip_fraction <= 1.0)) throw invalid_input("skip fraction must lie in [0,1]");
    if (!(capacity >= 0.0 && viewers >= 0.0)) throw invalid_input("capacity and population must be nonnegative");
    return capacity - viewers + viewers * skip_fraction;
}

namespace detail {

inline std::size_t grid_units(double total, double grid) {
    if (!(grid > 0.0)) throw invalid_input("grid step must be positive");
    if (!(total >= 0.0)) throw invalid_input("total must be nonnegative");
    double const units = total / grid;
    if (std::abs(units - std::round(units)) > 1e-9)
        throw invalid_input("total is not a whole number of grid steps");
    return static_cast<std::size_t>(std::llround(units));
}

inline void check_users(std::size_t n) {
    if (n == 0 || n > 4) throw invalid_input("exhaustive search supports 1 to 4 users");
}

inline constexpr double max_search_points = 1e7;

inline void check_search_size(std::size_t units, std::size_t parts) {
    // Number of compositions: C(units + parts - 1, parts - 1).
    double count = 1.0;
    for (std::size_t k = 1; k < parts; ++k)
        count = count * static_cast<double>(units + k) / static_cast<double>(k);
    if (count > max_search_points) throw invalid_input("grid too fine for exhaustive search");
}

// Calls visit(units) for every split of `units` into `parts` nonnegative
// integers.
template <typename Visit>
void for_each_composition(std::size_t units, std::size_t parts, Visit&& visit) {
    std::vector<std::size_t> cur(parts, 0);
    auto rec = [&](auto&& self, std::size_t idx, std::size_t left) -> void {
        if (idx + 1 == parts) {
            cur[idx] = left;
            visit(std::as_const(cur));
            return;
        }
        for (std::size_t u = 0; u <= left; ++u) {
            cur[idx] = u;
            self(self, idx + 1, left - u);
        }
    };
    rec(rec, 0, units);
}

} // namespace detail

struct min_skip_result {
    std::vector<double> buffers;
    double gamma = 0.0; // mean skip probability
};

// Minimizes (1/N) sum g(b_i) over grid vectors with sum b_i = total.
inline min_skip_result brute_force_min_skip(std::size_t users, double total, skip_prob_fn const& g, double grid) {
    detail::check_users(users);
    auto const units = detail::grid_units(total, grid);
    detail::check_search_size(units, users);
    min_skip_result best{{}, std::numeric_limits<double>::infinity()};
    detail::for_each_composition(units, users, [&](std::vector<std::size_t> const& split) {
        double sum = 0.0;
        for (auto u : split) sum += g(static_cast<double>(u) * grid);
        double const gamma = sum / static_cast<double>(users);
        if (gamma < best.gamma) {
            best.gamma = gamma;
            best.buffers.assign(split.size(), 0.0);
            for (std::size_t i = 0; i < split.size(); ++i) best.buffers[i] = static_cast<double>(split[i]) * grid;
        }
    });
    return best;
}

struct min_waste_result {
    std::vector<double> buffers;
    double max_waste_rate = 0.0; // max_i f_i * b_i
    double wastage = 0.0;        // sum_i f_i * b_i
};

// Among grid vectors with sum b_i = total, finds the one whose waste-rate
// vector f_i * b_i is lexicographically smallest when sorted in descending
// order (smallest maximum, then smallest runner-up, ...).
inline min_waste_result brute_force_min_waste(std::span<double const> hazards, double total, double grid) {
    detail::check_users(hazards.size());
    for (double f : hazards)
        if (!(f >= 0.0 && f <= 1.0)) throw invalid_input("departure rates must lie in [0,1]");
    auto const units = detail::grid_units(total, grid);
    detail::check_search_size(units, hazards.size());

    std::vector<double> best_key;
    min_waste_result best;
    std::vector<double> key(hazards.size());
    detail::for_each_composition(units, hazards.size(), [&](std::vector<std::size_t> const& split) {
        for (std::size_t i = 0; i < split.size(); ++i) key[i] = hazards[i] * static_cast<double>(split[i]) * grid;
        std::sort(key.begin(), key.end(), std::greater<>());
        bool better = best_key.empty();
        for (std::size_t i = 0; !better && i < key.size(); ++i) {
            if (key[i] < best_key[i] - 1e-12) better = true;
            else if (key[i] > best_key[i] + 1e-12) break;
        }
        if (better) {
            best_key = key;
            best.buffers.assign(split.size(), 0.0);
            for (std::size_t i = 0; i < split.size(); ++i) best.buffers[i] = static_cast<double>(split[i]) * grid;
        }
    });
    best.max_waste_rate = best_key.front();
    best.wastage = 0.0;
    for (std::size_t i = 0; i < hazards.size(); ++i) best.wastage += hazards[i] * best.buffers[i];
    return best;
}

// Minimizes (1/N) sum g(b_i) subject to sum f_i * b_i = wastage. The first
// N-1 buffers range over the grid; the last is solved from the constraint.
inline min_skip_result constrained_min_skip(std::span<double const> hazards, double wastage, skip_prob_fn const& g,
                                            double grid) {
    detail::check_users(hazards.size());
    if (!(grid > 0.0)) throw invalid_input("grid step must be positive");
    if (!(wastage >= 0.0)) throw invalid_input("wastage must be nonnegative");
    for (double f : hazards)
        if (!(f > 0.0 && f <= 1.0)) throw invalid_input("departure rates must lie in (0,1]");

    std::size_t const n = hazards.size();
    min_skip_result best{{}, std::numeric_limits<double>::infinity()};
    std::vector<double> b(n, 0.0);
    auto rec = [&](auto&& self, std::size_t idx, double budget) -> void {
        if (idx + 1 == n) {
            b[idx] = budget / hazards[idx];
            double sum = 0.0;
            for (double x : b) sum += g(x);
            double const gamma = sum / static_cast<double>(n);
            if (gamma < best.gamma) {
                best.gamma = gamma;
                best.buffers = b;
            }
            return;
        }
        for (std::size_t k = 0;; ++k) {
            double const x = static_cast<double>(k) * grid;
            double const spend = hazards[idx] * x;
            if (spend > budget + 1e-12) break;
            b[idx] = x;
            self(self, idx + 1, std::max(0.0, budget - spend));
        }
    };
    rec(rec, 0, wastage);
    return best;
}

// Checks g'(b_i) / g'(b_j) = f_i / f_j for every ordered pair within
// `tolerance`. Returns nullopt when a denominator vanishes.
inline std::optional<bool> lagrange_condition_check(std::span<double const> buffers, std::span<double const> hazards,
                                                    skip_prob_fn const& g, double tolerance, double step) {
    if (buffers.size() != hazards.size()) throw invalid_input("buffers and rates differ in length");
    if (!(step > 0.0)) throw invalid_input("derivative step must be positive");
    std::vector<double> slope(buffers.size());
    for (std::size_t i = 0; i < buffers.size(); ++i) slope[i] = g.derivative(buffers[i], step);

    bool ok = true;
    for (std::size_t i = 0; i < buffers.size(); ++i) {
        for (std::size_t j = 0; j < buffers.size(); ++j) {
            if (i == j) continue;
            if (std::abs(slope[j]) < 1e-14 || hazards[j] == 0.0) return std::nullopt;
            if (std::abs(slope[i] / slope[j] - hazards[i] / hazards[j]) > tolerance) ok = false;
        }
    }
    return ok;
}

} // namespace smartstream
