#include <gtest/gtest.h>

#include <cmath>

#include "smartstream/steady_state.hpp"
#include "smartstream/verification.hpp"

using namespace smartstream;

namespace {
skip_prob_fn exp_decay() {
    return skip_prob_fn([](double b) { return std::exp(-b); });
}
} // namespace

TEST(SkipProbFn, ExponentialDefault) {
    auto g = skip_prob_fn::exponential();
    EXPECT_DOUBLE_EQ(g(0), 1.0);
    EXPECT_DOUBLE_EQ(g(1), 0.5);
    EXPECT_DOUBLE_EQ(skip_prob_fn::exponential(0.5)(2), 0.125);
    EXPECT_TRUE(g.check_shape(10, 0.1));
    EXPECT_THROW(skip_prob_fn::exponential(0), invalid_input);
    EXPECT_THROW(skip_prob_fn::exponential(1.5), invalid_input);
}

TEST(SkipProbFn, ShapeCheckRejectsConcaveOrIncreasing) {
    EXPECT_FALSE(skip_prob_fn([](double b) { return 1 - b * b / 100; }).check_shape(5, 0.1));
    EXPECT_FALSE(skip_prob_fn([](double b) { return 0.1 * b; }).check_shape(5, 0.1));
}

TEST(SkipProbFn, RandomMixturesAreConvexAndDecreasing) {
    rng g(1, stream::verification);
    for (int k = 0; k < 100; ++k) {
        auto f = random_convex_skip_fn(g);
        EXPECT_TRUE(f.check_shape(8, 0.05));
        EXPECT_NEAR(f(0), 1.0, 1e-12);
    }
}

TEST(WastageIdentity, Examples) {
    EXPECT_DOUBLE_EQ(wastage_identity(100, 100, 0.05), 5);
    EXPECT_DOUBLE_EQ(wastage_identity(100, 95, 0), 5);
    EXPECT_DOUBLE_EQ(wastage_identity(70, 70, 0), 0);
    EXPECT_THROW(wastage_identity(100, 95, 1.5), invalid_input);
}

TEST(BruteForceMinSkip, Examples) {
    auto r = brute_force_min_skip(2, 4, exp_decay(), 0.25);
    EXPECT_EQ(r.buffers, (std::vector<double>{2, 2}));

    r = brute_force_min_skip(3, 3, skip_prob_fn::exponential(), 0.5);
    EXPECT_EQ(r.buffers, (std::vector<double>{1, 1, 1}));
    EXPECT_DOUBLE_EQ(r.gamma, 0.5);

    r = brute_force_min_skip(2, 0, exp_decay(), 0.25);
    EXPECT_EQ(r.buffers, (std::vector<double>{0, 0}));
}

TEST(BruteForceMinSkip, Errors) {
    EXPECT_THROW(brute_force_min_skip(5, 4, exp_decay(), 0.25), invalid_input);
    EXPECT_THROW(brute_force_min_skip(0, 4, exp_decay(), 0.25), invalid_input);
    EXPECT_THROW(brute_force_min_skip(2, 1, exp_decay(), 0.3), invalid_input);
    EXPECT_THROW(brute_force_min_skip(2, 1, exp_decay(), 0), invalid_input);
    EXPECT_THROW(brute_force_min_skip(4, 1000, exp_decay(), 0.01), invalid_input);
}

TEST(BruteForceMinWaste, Examples) {
    std::vector<double> f{0.2, 0.1};
    auto r = brute_force_min_waste(f, 3, 0.25);
    EXPECT_EQ(r.buffers, (std::vector<double>{1, 2}));
    EXPECT_DOUBLE_EQ(r.max_waste_rate, 0.2);
    EXPECT_DOUBLE_EQ(r.wastage, 0.4);

    std::vector<double> same{0.3, 0.3, 0.3};
    EXPECT_EQ(brute_force_min_waste(same, 3, 0.25).buffers, (std::vector<double>{1, 1, 1}));

    std::vector<double> one{0.7};
    EXPECT_EQ(brute_force_min_waste(one, 2.5, 0.25).buffers, (std::vector<double>{2.5}));

    std::vector<double> bad{1.2};
    EXPECT_THROW(brute_force_min_waste(bad, 1, 0.25), invalid_input);
}

TEST(LagrangeCheck, Examples) {
    auto g = exp_decay();
    std::vector<double> f{0.2, 0.1};
    std::vector<double> solved{1, 1 + std::log(2.0)};
    EXPECT_EQ(lagrange_condition_check(solved, f, g, 1e-6, 1e-4), std::optional<bool>(true));
    std::vector<double> equal{1, 1};
    EXPECT_EQ(lagrange_condition_check(equal, f, g, 0.1, 1e-4), std::optional<bool>(false));

    std::vector<double> constant_f{0.3, 0.3, 0.3};
    std::vector<double> eq3{2, 2, 2};
    auto convex = skip_prob_fn([](double b) { return 1 / (1 + b * b * b); });
    EXPECT_EQ(lagrange_condition_check(eq3, constant_f, convex, 1e-9, 1e-3), std::optional<bool>(true));
}

TEST(LagrangeCheck, FlatDerivativeIsIndeterminate) {
    auto flat = skip_prob_fn([](double) { return 0.25; });
    std::vector<double> f{0.2, 0.1}, b{1, 2};
    EXPECT_FALSE(lagrange_condition_check(b, f, flat, 0.1, 1e-3).has_value());
    std::vector<double> short_b{1};
    EXPECT_THROW(lagrange_condition_check(short_b, f, flat, 0.1, 1e-3), invalid_input);
}

TEST(ConstrainedMinSkip, RecoversClosedForm) {
    // g = e^-b, f = [0.2, 0.1]: optimum has b2 - b1 = ln 2.
    std::vector<double> f{0.2, 0.1};
    double const b1 = 2, b2 = 2 + std::log(2.0);
    double const W = f[0] * b1 + f[1] * b2;
    auto r = constrained_min_skip(f, W, exp_decay(), 0.01);
    EXPECT_NEAR(r.buffers[0], b1, 0.02);
    EXPECT_NEAR(r.buffers[1], b2, 0.04);
    EXPECT_NEAR(f[0] * r.buffers[0] + f[1] * r.buffers[1], W, 1e-9);
}

TEST(Claims, AllPassOnDefaultSeed) {
    for (auto const& c : verify_all(12345)) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(Claims, EqualBuffersHoldAcrossSeeds) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        EXPECT_TRUE(verify_equal_buffers(s).passed);
        EXPECT_TRUE(verify_equal_waste_rates(s).passed);
        EXPECT_TRUE(verify_lagrange_condition(s).passed);
    }
}
