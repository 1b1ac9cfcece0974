#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace spre {

// Piecewise-constant, right-continuous hub speed schedule.
class StepSchedule {
public:
    struct Step {
        double start_time;  // [s]
        double speed;       // [m/s]
    };

    // Start times must be strictly increasing with the first at t=0.
    static StepSchedule make(std::vector<Step> steps);
    static StepSchedule constant(double speed) { return make({{0.0, speed}}); }

    double at(double t) const;
    const std::vector<Step>& steps() const { return steps_; }

private:
    std::vector<Step> steps_;
};

StepSchedule stepwise_schedule(std::vector<StepSchedule::Step> steps);

struct ShearedField {
    StepSchedule hub_speed = StepSchedule::constant(8.0);
    double shear_exponent = 0.0;  // alpha
    double hub_height = 90.0;     // [m]
};

// hub_speed(t) * (height / hub_height)^alpha
double power_law_speed(const ShearedField& field, double height, double t);

// Single Gaussian wake of an upstream turbine, frozen in time.
struct WakeField {
    double ambient_speed = 12.0;         // [m/s]
    double turbulence_intensity = 0.06;  // [-]
    double downstream_spacing = 3.0;     // [rotor diameters]
    double crosswind_offset = 0.0;       // [m], +y is the right half of the disk
    double rotor_diameter = 126.0;       // [m]
    double hub_height = 90.0;            // [m]
    double thrust_coefficient = 0.8;

    double expansion_rate() const;  // k*
    double initial_width() const;   // sigma_0 [m]
    double width() const;           // sigma at the downstream plane [m]
    double peak_fraction() const;   // C, centre deficit as a fraction of ambient

    void validate() const;
};

double wake_deficit(const WakeField& field, double y, double z);

// Composite inflow: power-law shear minus an optional wake whose crosswind
// offset drifts linearly from offset_start to offset_end over drift_duration.
class WindField {
public:
    static WindField sheared(ShearedField shear);
    static WindField wake(WakeField wake, double offset_start, double offset_end,
                          double drift_duration);
    static WindField composite(ShearedField shear, WakeField wake, double offset_start,
                               double offset_end, double drift_duration);

    const ShearedField& shear() const { return shear_; }
    const std::optional<WakeField>& wake_field() const { return wake_; }
    double wake_offset(double t) const;

    // Wake geometry at time t (offset resolved); nullopt when there is no wake.
    std::optional<WakeField> wake_at(double t) const;

private:
    ShearedField shear_;
    std::optional<WakeField> wake_;
    double offset_start_ = 0.0;
    double offset_end_ = 0.0;
    double drift_duration_ = 1.0;
};

// Shear speed minus wake deficit, clamped at zero. Throws for z <= 0.
double sample_velocity(const ShearedField& field, double y, double z, double t);
double sample_velocity(const WakeField& field, double y, double z, double t);
double sample_velocity(const WindField& field, double y, double z, double t);

}  // namespace spre
