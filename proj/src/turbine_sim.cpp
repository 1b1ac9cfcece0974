#include "spre/turbine_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spre {

double TurbineParams::rated_moop(const ConeSurface& s, double rated_speed) const {
    const double q = 0.5 * air.density * geom.rotor_area * geom.rotor_radius;
    return q * rated_speed * rated_speed * s.base(tsr_opt, 0.0);
}

void TurbineParams::validate() const {
    geom.validate();
    air.validate();
    std::vector<std::string> v;
    if (!(tsr_opt > 0.0)) v.emplace_back("tsr_opt must be > 0");
    if (!(speed_time_constant > 0.0)) v.emplace_back("speed_time_constant must be > 0");
    if (!(rotor_speed_min > 0.0 && rotor_speed_rated >= rotor_speed_min)) {
        v.emplace_back("rotor speed limits must satisfy 0 < min <= rated");
    }
    if (!(noise_sigma >= 0.0)) v.emplace_back("noise_sigma must be >= 0");
    if (pitch_speeds.size() != pitch_deg.size() || pitch_speeds.size() < 2) {
        v.emplace_back("pitch table must have matching knots (>= 2)");
    } else {
        for (std::size_t i = 1; i < pitch_speeds.size(); ++i) {
            if (!(pitch_speeds[i] > pitch_speeds[i - 1]) || pitch_deg[i] < pitch_deg[i - 1]) {
                v.emplace_back("pitch table must be increasing in speed and non-decreasing in pitch");
                break;
            }
        }
    }
    if (!v.empty()) throw ConfigError(std::move(v));
}

double blade_effective_speed(const WindField& field, const TurbineGeometry& geom, double psi,
                             double t) {
    const double r = 2.0 * geom.rotor_radius / 3.0;
    const double y = r * std::sin(psi);
    const double z = geom.hub_height + r * std::cos(psi);
    return sample_velocity(field, y, z, t);
}

BewsReference bews_reference(const WindField& field, const TurbineGeometry& geom, double psi1,
                             double t) {
    BewsReference ref;
    const auto psi = blade_azimuths(psi1);
    double sum = 0.0;
    for (int i = 0; i < kBlades; ++i) {
        ref.speed[i] = blade_effective_speed(field, geom, psi[i], t);
        sum += ref.speed[i];
    }
    ref.rews = sum / kBlades;
    return ref;
}

double collective_pitch(const TurbineParams& params, double rews) {
    const auto& xs = params.pitch_speeds;
    const auto& ys = params.pitch_deg;
    if (rews <= xs.front()) return deg2rad(ys.front());
    if (rews >= xs.back()) return deg2rad(ys.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), rews);
    const std::size_t i1 = static_cast<std::size_t>(it - xs.begin());
    const std::size_t i0 = i1 - 1;
    const double w = (rews - xs[i0]) / (xs[i1] - xs[i0]);
    return deg2rad((1.0 - w) * ys[i0] + w * ys[i1]);
}

std::array<double, kBlades> pitch_schedule(const TurbineParams& params,
                                           const TurbineState& /*state*/, double rews) {
    const double b = collective_pitch(params, rews);
    return {b, b, b};
}

TurbineSim::TurbineSim(TurbineParams params, ConeSurface surface_truth, std::uint64_t noise_seed)
    : params_(std::move(params)), surface_(surface_truth), rng_(noise_seed) {
    params_.validate();
    surface_.validate();
}

namespace {

double target_rotor_speed(const TurbineParams& p, double rews) {
    return std::clamp(p.tsr_opt * rews / p.geom.rotor_radius, p.rotor_speed_min,
                      p.rotor_speed_rated);
}

}  // namespace

TurbineState TurbineSim::initial_state(const WindField& field) const {
    TurbineState s;
    const BewsReference ref = bews_reference(field, params_.geom, 0.0, 0.0);
    s.rotor_speed = target_rotor_speed(params_, ref.rews);
    s.pitch = pitch_schedule(params_, s, ref.rews);
    return s;
}

StepResult TurbineSim::step(const TurbineState& state, const WindField& field, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("TurbineSim::step: dt must be > 0");
    StepResult out;
    TurbineState& s = out.state;
    s = state;
    s.time = state.time + dt;
    s.azimuth_total = state.azimuth_total + state.rotor_speed * dt;
    s.azimuth = wrap_angle(s.azimuth_total);

    out.reference = bews_reference(field, params_.geom, s.azimuth, s.time);
    const double rews = out.reference.rews;
    const double omega_tgt = target_rotor_speed(params_, rews);
    s.rotor_speed = state.rotor_speed + dt * (omega_tgt - state.rotor_speed) /
                                            params_.speed_time_constant;
    s.pitch = pitch_schedule(params_, s, rews);

    Measurement& m = out.measurement;
    m.time = s.time;
    m.rotor_speed = s.rotor_speed;
    m.pitch = s.pitch;
    m.azimuth = blade_azimuths(s.azimuth);
    const double q = 0.5 * params_.air.density * params_.geom.rotor_area * params_.geom.rotor_radius;
    for (int i = 0; i < kBlades; ++i) {
        const double u = out.reference.speed[i];
        double moment = 0.0;
        if (u > 0.0) {
            const double tsr = s.rotor_speed * params_.geom.rotor_radius / u;
            moment = q * u * u * surface_eval(surface_, tsr, s.pitch[i], m.azimuth[i]);
        }
        out.moop_clean[i] = moment;
        if (params_.noise_sigma > 0.0) moment += params_.noise_sigma * normal_(rng_);
        m.moop[i] = moment;
    }
    return out;
}

}  // namespace spre
