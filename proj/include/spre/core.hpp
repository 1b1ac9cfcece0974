#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace spre {

inline constexpr int kBlades = 3;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline constexpr double rpm2rads(double rpm) { return rpm * kTwoPi / 60.0; }

// Wraps an angle into [0, 2pi).
double wrap_angle(double rad);

// Blade azimuths for a rotor whose blade 1 sits at psi1; blades lag by 2pi/3.
std::array<double, kBlades> blade_azimuths(double psi1);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct TurbineGeometry {
    double rotor_radius = 63.0;  // [m]
    double hub_height = 90.0;    // [m]
    double rotor_area = kPi * 63.0 * 63.0;  // [m^2]
    int n_blades = kBlades;

    // Builds a geometry with a consistent disk area; throws ConfigError.
    static TurbineGeometry make(double rotor_radius, double hub_height);
    void validate() const;
};

struct AirProperties {
    double density = 1.225;  // [kg/m^3]
    void validate() const;
};

struct OperatingPoint {
    double rotor_speed = 0.0;                 // [rad/s]
    std::array<double, kBlades> azimuth{};    // [rad], wrapped
    std::array<double, kBlades> pitch{};      // [rad]
    std::array<double, kBlades> tsr{};        // [-]

    // tsr_i = rotor_speed * R / speed_i
    static OperatingPoint make(double rotor_speed, double psi1,
                               const std::array<double, kBlades>& pitch,
                               const std::array<double, kBlades>& speed,
                               const TurbineGeometry& geom);
};

struct SimConfig {
    double dt_sim = 0.01;                  // [s]
    double duration = 1000.0;              // [s]
    int estimator_samples_per_rev = 60;    // P
    int past_window = 12;                  // p
    double forgetting = 0.9999;            // gamma
    int n_splines = 8;                     // N_b
    int spline_degree = 3;                 // N_k
    int horizon_pred = 3;                  // N_p
    int horizon_est = 2;                   // N_u
    // Q = blkdiag(q_output I, q_theta I, q_doutput I); R = r_input I
    double q_output = 1.0;
    double q_theta = 1e-2;
    double q_doutput = 1.0;
    double r_input = 1e-1;
    double prbs_amplitude = 0.2;           // [m/s]
    double prbs_cutoff = 5.0;              // [Hz]
    std::uint64_t rng_seed = 1;

    double rls_ridge = 1e-4;               // delta_0
    int warmup_revs = 10;
    double prior_time_constant = 30.0;     // [s]
    double initial_speed = 11.4;           // [m/s] estimator prior before any load is seen
    double moop_scale = 1e6;               // [N m] per estimator output unit
};

// Returns cfg unchanged when every invariant holds, otherwise throws a
// ConfigError listing each violated invariant.
SimConfig validate_config(const SimConfig& cfg);

// Stateful +/-amplitude binary sequence through a first-order low-pass.
class PrbsGenerator {
public:
    PrbsGenerator(std::uint64_t seed, double amplitude, double cutoff_hz, double dt);
    double next();

private:
    std::mt19937_64 rng_;
    double amplitude_;
    double alpha_;
    double state_ = 0.0;
};

std::vector<double> filtered_prbs(std::uint64_t seed, double amplitude, double cutoff_hz,
                                  double dt, std::size_t n);

// Derives an independent stream seed from a base seed and a stream id.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace spre
