#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "dhflow/diagnostics.hpp"
#include "dhflow/initial_data.hpp"

using namespace dhflow;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

TEST(Budget, Values) {
    EXPECT_EQ(singularity_budget(10.0, 1.0), 40);
    EXPECT_EQ(singularity_budget(0.0, 1.0), 0);
    // floor(4 * 2 pi^2 / (4 pi^2)) = floor(2) = 2.
    EXPECT_EQ(singularity_budget(2.0 * kPi * kPi, 4.0 * kPi * kPi), 2);
    EXPECT_THROW(singularity_budget(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(singularity_budget(1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(singularity_budget(-1.0, 1.0), std::invalid_argument);
}

TEST(Budget, EpsilonReport) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16, {1, 0});
    const MapField u = smooth_map(g, Target::sphere(3), 0.3, 1);
    const VectorSpinorField psi = smooth_spinor(u, 0.2, 2);
    const std::vector<double> eps{2.0, 1.0, 0.5, 0.25};
    const auto rows = epsilon_budget_report(u, psi, [](double) { return 1.0; }, eps);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GT(rows[i].bound, rows[i - 1].bound);
        EXPECT_NEAR(rows[i].delta5 * rows[i].eps, rows[0].delta5 * rows[0].eps, 1e-12);
    }
    const auto zero = epsilon_budget_report(u, VectorSpinorField(g, 3), [](double e) { return e; }, eps);
    for (const auto& r : zero) {
        EXPECT_EQ(r.delta5, 0.0);
        EXPECT_NEAR(r.bound, r.F0 / r.delta1, 1e-14);
    }
}

TEST(Monitor, DefaultRadii) {
    const auto r64 = default_radii(make_grid(kTwoPi, kTwoPi, 64, 64));
    ASSERT_EQ(r64.size(), 3u);
    EXPECT_DOUBLE_EQ(r64[0], kPi / 2);
    EXPECT_DOUBLE_EQ(r64[2], kPi / 8);
    const auto r16 = default_radii(make_grid(kTwoPi, kTwoPi, 16, 16));
    for (double R : r16) EXPECT_GE(R, 2.0 * kTwoPi / 16);
    MonitorConfig bad;
    bad.cadence = 0;
    EXPECT_THROW(validate(bad, make_grid(kTwoPi, kTwoPi, 16, 16)), std::exception);
}

TEST(Monitor, EnergyStepRule) {
    EXPECT_TRUE(energy_step_ok(1.0, 0.9, 0.1, 1.0));
    EXPECT_TRUE(energy_step_ok(1.0, 1.001, 0.1, 1.0));
    EXPECT_FALSE(energy_step_ok(1.0, 1.01, 0.1, 1.0));
}

TEST(Singularities, BubbleThresholdEvent) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 64, 64);
    const MapField u = bubble_map(g, 0.2, 2.0, kPi, kPi);
    const FlowState s(0.0, 1.0, u, VectorSpinorField(g, 3));
    const auto ev = threshold_events(s, 2.0 * kPi, kPi / 8);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_LE(periodic_distance(g, ev[0].center, snap_to_grid(g, kPi, kPi)), 2.0 * g.hx);
    EXPECT_GE(ev[0].local_F, 2.0 * kPi);
    EXPECT_EQ(ev[0].trigger, EventTrigger::Threshold);
    EXPECT_TRUE(threshold_events(s, 100.0, kPi / 8).empty());
    EXPECT_GT(dh_blowup_quantity(s, kPi, kPi, 0.5), 0.0);
}

TEST(Singularities, TwoBubblesMergeOnlyWhenClose) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 64, 64);
    const MapField a = bubble_map(g, 0.15, 1.0, 1.5, 1.5);
    const MapField b = bubble_map(g, 0.15, 1.0, 4.5, 4.5);
    MapField u = a;
    // Outside its cutoff each bubble is the north pole, so the two glue smoothly.
    for (std::size_t p = 0; p < g.size(); ++p)
        if (a.at(p, 2) == 1.0)
            for (int i = 0; i < 3; ++i) u.at(p, i) = b.at(p, i);
    const FlowState s(0.0, 1.0, u, VectorSpinorField(g, 3));
    EXPECT_EQ(threshold_events(s, 6.0, 0.4).size(), 2u);
}

TEST(Stability, IdenticalStatesHaveZeroGap) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16, {1, 0});
    const MapField u = smooth_map(g, Target::sphere(3), 0.3, 3);
    const FlowState s(0.0, 2.0, u, smooth_spinor(u, 0.1, 4));
    const StabilityReport r = stability_gap(s, s, 0.02, StepControl{});
    for (const auto& smp : r.samples) EXPECT_EQ(smp.gap, 0.0);
}

TEST(Stability, GapGrowthIsBounded) {
    const GridSpec g = make_grid(kTwoPi, kTwoPi, 16, 16, {1, 0});
    const MapField u = smooth_map(g, Target::sphere(3), 0.3, 3);
    const FlowState a(0.0, 2.0, u, smooth_spinor(u, 0.1, 4));
    const FlowState b(0.0, 2.0, u, smooth_spinor(u, 0.1, 5));
    const StabilityReport r = stability_gap(a, b, 0.05, StepControl{});
    ASSERT_GE(r.samples.size(), 2u);
    EXPECT_GT(r.samples.front().gap, 0.0);
    EXPECT_TRUE(std::isfinite(r.lambda));
    EXPECT_TRUE(r.bound_holds);
}
