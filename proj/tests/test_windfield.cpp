#include <gtest/gtest.h>

#include <cmath>

#include "spre/core.hpp"
#include "spre/windfield.hpp"

using namespace spre;

TEST(PowerLaw, AnchoredAtHubHeight) {
    ShearedField f{StepSchedule::constant(9.3), 0.2, 90.0};
    EXPECT_EQ(power_law_speed(f, 90.0, 12.0), 9.3);
}

TEST(PowerLaw, DoubleHubHeight) {
    ShearedField f{StepSchedule::constant(10.0), 0.2, 90.0};
    EXPECT_NEAR(power_law_speed(f, 180.0, 0.0), 11.487, 5e-4);
    EXPECT_NEAR(power_law_speed(f, 180.0, 0.0), 10.0 * std::pow(2.0, 0.2), 1e-12);
}

TEST(PowerLaw, ZeroShearIsUniform) {
    ShearedField f{StepSchedule::constant(7.0), 0.0, 90.0};
    for (double z : {1.0, 30.0, 90.0, 150.0}) EXPECT_EQ(power_law_speed(f, z, 0.0), 7.0);
}

TEST(PowerLaw, RejectsNonPositiveHeight) {
    ShearedField f;
    EXPECT_THROW(power_law_speed(f, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(power_law_speed(f, -5.0, 0.0), std::invalid_argument);
}

TEST(PowerLaw, StrictlyIncreasingWithPositiveShear) {
    ShearedField f{StepSchedule::constant(10.0), 0.2, 90.0};
    double prev = 0.0;
    for (double z = 5.0; z < 200.0; z += 5.0) {
        const double u = power_law_speed(f, z, 0.0);
        EXPECT_GT(u, prev);
        prev = u;
    }
}

TEST(StepSchedule, EndpointsOfRange) {
    const auto s = stepwise_schedule({{0.0, 8.0}, {200.0, 15.0}});
    EXPECT_EQ(s.at(199.99), 8.0);
    EXPECT_EQ(s.at(200.0), 15.0);
    EXPECT_EQ(s.at(1e6), 15.0);
}

TEST(StepSchedule, SingleStepEverywhere) {
    const auto s = stepwise_schedule({{0.0, 8.0}});
    for (double t : {0.0, 0.5, 100.0, 1e5}) EXPECT_EQ(s.at(t), 8.0);
}

TEST(StepSchedule, RightContinuous) {
    const auto s = stepwise_schedule({{0.0, 8.0}, {100.0, 10.0}});
    EXPECT_EQ(s.at(100.0), 10.0);
    EXPECT_EQ(s.at(std::nextafter(100.0, 0.0)), 8.0);
}

TEST(StepSchedule, RejectsBadOrdering) {
    EXPECT_THROW(stepwise_schedule({{0.0, 8.0}, {100.0, 9.0}, {50.0, 10.0}}), std::invalid_argument);
    EXPECT_THROW(stepwise_schedule({{0.0, 8.0}, {100.0, 9.0}, {100.0, 10.0}}), std::invalid_argument);
    EXPECT_THROW(stepwise_schedule({{5.0, 8.0}}), std::invalid_argument);
    EXPECT_THROW(stepwise_schedule({}), std::invalid_argument);
    EXPECT_THROW(stepwise_schedule({{0.0, 0.0}}), std::invalid_argument);
}

namespace {

WakeField reference_wake(double offset = 0.0) {
    WakeField w;
    w.ambient_speed = 12.0;
    w.turbulence_intensity = 0.06;
    w.downstream_spacing = 3.0;
    w.crosswind_offset = offset;
    return w;
}

}  // namespace

TEST(Wake, ParametersWellDefined) {
    const WakeField w = reference_wake();
    EXPECT_NO_THROW(w.validate());
    EXPECT_NEAR(w.expansion_rate(), 0.38 * 0.06 + 0.004, 1e-15);
    EXPECT_GT(w.width(), w.initial_width());
    EXPECT_GT(w.peak_fraction(), 0.0);
    EXPECT_LT(w.peak_fraction(), 1.0);
}

TEST(Wake, PeakAtCentre) {
    const WakeField w = reference_wake(40.0);
    const double peak = wake_deficit(w, 40.0, w.hub_height);
    EXPECT_NEAR(peak, w.ambient_speed * w.peak_fraction(), 1e-12);
    for (double dy : {-20.0, -1.0, 1.0, 5.0}) {
        EXPECT_LT(wake_deficit(w, 40.0 + dy, w.hub_height), peak);
        EXPECT_LT(wake_deficit(w, 40.0, w.hub_height + dy), peak);
    }
}

TEST(Wake, GaussianTail) {
    const WakeField w = reference_wake();
    const double r = 10.0 * w.width();
    EXPECT_LT(wake_deficit(w, r, w.hub_height), 1e-20 * w.ambient_speed * w.peak_fraction());
}

TEST(Wake, RadiallySymmetric) {
    const WakeField w = reference_wake(25.0);
    for (double a : {3.0, 17.0, 44.0}) {
        EXPECT_DOUBLE_EQ(wake_deficit(w, 25.0 + a, 80.0), wake_deficit(w, 25.0 - a, 80.0));
    }
}

TEST(Wake, RadiallyMonotoneAndBounded) {
    const WakeField w = reference_wake(-10.0);
    double prev = wake_deficit(w, -10.0, w.hub_height);
    for (double r = 1.0; r < 200.0; r += 1.0) {
        const double d = wake_deficit(w, -10.0 + r * 0.6, w.hub_height + r * 0.8);
        EXPECT_LE(d, prev);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, w.ambient_speed);
        prev = d;
    }
}

TEST(Wake, ValidateRejectsBadTurbulence) {
    WakeField w = reference_wake();
    w.turbulence_intensity = 1.2;
    EXPECT_THROW(w.validate(), ConfigError);
    w.turbulence_intensity = 0.0;
    EXPECT_THROW(w.validate(), ConfigError);
}

TEST(SampleVelocity, PureShearMatchesPowerLaw) {
    ShearedField f{stepwise_schedule({{0.0, 8.0}, {10.0, 11.0}}), 0.2, 90.0};
    const WindField wf = WindField::sheared(f);
    for (double t : {0.0, 10.0}) {
        for (double z : {40.0, 90.0, 140.0}) {
            EXPECT_EQ(sample_velocity(wf, 5.0, z, t), power_law_speed(f, z, t));
            EXPECT_EQ(sample_velocity(f, 5.0, z, t), power_law_speed(f, z, t));
        }
    }
}

TEST(SampleVelocity, ClampAtFullDeficit) {
    // A narrow, heavily loaded near wake saturates the closure at C = 1.
    WakeField w = reference_wake();
    w.thrust_coefficient = 0.9;
    w.downstream_spacing = 0.01;
    EXPECT_EQ(w.peak_fraction(), 1.0);
    EXPECT_NEAR(sample_velocity(w, 0.0, w.hub_height, 0.0), 0.0, 1e-9);
    EXPECT_GE(sample_velocity(w, 0.0, w.hub_height, 0.0), 0.0);
}

TEST(SampleVelocity, FarFromWakeIsAmbient) {
    const WakeField w = reference_wake();
    EXPECT_NEAR(sample_velocity(w, 2000.0, w.hub_height, 0.0), w.ambient_speed, 1e-9);
}

TEST(SampleVelocity, NeverNegativeAndRejectsGround) {
    const WindField wf = WindField::composite({StepSchedule::constant(12.0), 0.2, 90.0}, reference_wake(), 60.0,
                                              0.0, 100.0);
    for (double y = -100.0; y <= 100.0; y += 10.0) {
        for (double z = 5.0; z <= 180.0; z += 10.0) EXPECT_GE(sample_velocity(wf, y, z, 50.0), 0.0);
    }
    EXPECT_THROW(sample_velocity(wf, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST(WindField, OffsetDriftsLinearly) {
    const WindField wf = WindField::wake(reference_wake(), 189.0, 0.0, 1000.0);
    EXPECT_DOUBLE_EQ(wf.wake_offset(0.0), 189.0);
    EXPECT_DOUBLE_EQ(wf.wake_offset(500.0), 94.5);
    EXPECT_DOUBLE_EQ(wf.wake_offset(1000.0), 0.0);
    EXPECT_DOUBLE_EQ(wf.wake_offset(2000.0), 0.0);
    // the deficit follows the offset
    const double c = wf.wake_at(500.0)->crosswind_offset;
    EXPECT_LT(sample_velocity(wf, c, 90.0, 500.0), sample_velocity(wf, -c, 90.0, 500.0));
}
