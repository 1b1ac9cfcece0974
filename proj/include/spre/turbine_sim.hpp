#pragma once

#include <array>
#include <random>
#include <vector>

#include "spre/cone_model.hpp"
#include "spre/core.hpp"
#include "spre/windfield.hpp"

namespace spre {

struct TurbineParams {
    TurbineGeometry geom;
    AirProperties air;
    double tsr_opt = 7.5;
    double speed_time_constant = 5.0;            // tau [s]
    double rotor_speed_min = rpm2rads(6.9);      // [rad/s]
    double rotor_speed_rated = rpm2rads(12.1);   // [rad/s]
    double noise_sigma = 0.0;                    // [N m], additive per blade
    // Collective pitch versus rotor-effective speed; linear between knots,
    // clamped outside [3, 25] m/s.
    std::vector<double> pitch_speeds{3.0, 11.4, 12.0, 13.0, 14.0, 16.0, 18.0, 20.0, 22.0, 25.0};
    std::vector<double> pitch_deg{0.0, 0.0, 4.0, 6.6, 8.7, 12.1, 14.9, 17.5, 19.9, 23.5};

    // Rated out-of-plane moment at rated wind, optimal TSR and zero pitch.
    double rated_moop(const ConeSurface& s, double rated_speed = 11.4) const;
    void validate() const;
};

struct TurbineState {
    double azimuth = 0.0;        // blade 1, wrapped [rad]
    double azimuth_total = 0.0;  // blade 1, unwrapped [rad]
    double rotor_speed = 1.0;    // [rad/s]
    std::array<double, kBlades> pitch{};
    double time = 0.0;
};

struct Measurement {
    std::array<double, kBlades> moop{};
    std::array<double, kBlades> azimuth{};
    double rotor_speed = 0.0;
    std::array<double, kBlades> pitch{};
    double time = 0.0;
};

struct BewsReference {
    std::array<double, kBlades> speed{};
    double rews = 0.0;
};

// Wind speed at 2/3 span for the blade at azimuth psi (psi = 0 points up).
double blade_effective_speed(const WindField& field, const TurbineGeometry& geom, double psi,
                             double t);
BewsReference bews_reference(const WindField& field, const TurbineGeometry& geom, double psi1,
                             double t);

double collective_pitch(const TurbineParams& params, double rews);
std::array<double, kBlades> pitch_schedule(const TurbineParams& params, const TurbineState& state,
                                           double rews);

struct StepResult {
    TurbineState state;
    Measurement measurement;
    BewsReference reference;
    std::array<double, kBlades> moop_clean{};  // plant moment before measurement noise
};

class TurbineSim {
public:
    TurbineSim(TurbineParams params, ConeSurface surface_truth, std::uint64_t noise_seed);

    // Settles the rotor speed and pitch at the inflow seen at t = 0, psi = 0.
    TurbineState initial_state(const WindField& field) const;

    StepResult step(const TurbineState& state, const WindField& field, double dt);

    const TurbineParams& params() const { return params_; }
    const ConeSurface& surface() const { return surface_; }

private:
    TurbineParams params_;
    ConeSurface surface_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace spre
