#include "spre/windfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spre/core.hpp"

namespace spre {

StepSchedule StepSchedule::make(std::vector<Step> steps) {
    if (steps.empty()) throw std::invalid_argument("step schedule: no steps");
    if (steps.front().start_time != 0.0) {
        throw std::invalid_argument("step schedule: first start time must be 0");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i].speed > 0.0)) throw std::invalid_argument("step schedule: speeds must be > 0");
        if (i > 0 && !(steps[i].start_time > steps[i - 1].start_time)) {
            throw std::invalid_argument("step schedule: start times must be strictly increasing");
        }
    }
    StepSchedule s;
    s.steps_ = std::move(steps);
    return s;
}

double StepSchedule::at(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double v, const Step& s) { return v < s.start_time; });
    if (it == steps_.begin()) return steps_.front().speed;
    return std::prev(it)->speed;
}

StepSchedule stepwise_schedule(std::vector<StepSchedule::Step> steps) {
    return StepSchedule::make(std::move(steps));
}

double power_law_speed(const ShearedField& field, double height, double t) {
    if (!(height > 0.0)) throw std::invalid_argument("power_law_speed: height must be > 0");
    const double u = field.hub_speed.at(t);
    if (field.shear_exponent == 0.0) return u;
    return u * std::pow(height / field.hub_height, field.shear_exponent);
}

double WakeField::expansion_rate() const { return 0.38 * turbulence_intensity + 0.004; }

double WakeField::initial_width() const {
    // Initial wake width 0.2*sqrt(beta)*D, beta = (1+sqrt(1-Ct)) / (2 sqrt(1-Ct)).
    const double s = std::sqrt(1.0 - thrust_coefficient);
    const double beta = 0.5 * (1.0 + s) / s;
    return 0.2 * std::sqrt(beta) * rotor_diameter;
}

double WakeField::width() const {
    return expansion_rate() * downstream_spacing * rotor_diameter + initial_width();
}

double WakeField::peak_fraction() const {
    const double sd = width() / rotor_diameter;
    const double radicand = 1.0 - thrust_coefficient / (8.0 * sd * sd);
    return 1.0 - std::sqrt(std::max(0.0, radicand));
}

void WakeField::validate() const {
    std::vector<std::string> v;
    if (!(ambient_speed > 0.0)) v.emplace_back("wake ambient_speed must be > 0");
    if (!(turbulence_intensity > 0.0 && turbulence_intensity < 1.0)) {
        v.emplace_back("wake turbulence_intensity must be in (0,1)");
    }
    if (!(downstream_spacing > 0.0)) v.emplace_back("wake downstream_spacing must be > 0");
    if (!(rotor_diameter > 0.0)) v.emplace_back("wake rotor_diameter must be > 0");
    if (!(thrust_coefficient > 0.0 && thrust_coefficient < 1.0)) {
        v.emplace_back("wake thrust_coefficient must be in (0,1)");
    }
    if (!v.empty()) throw ConfigError(std::move(v));
}

double wake_deficit(const WakeField& field, double y, double z) {
    const double sigma = field.width();
    const double dy = y - field.crosswind_offset;
    const double dz = z - field.hub_height;
    const double r2 = dy * dy + dz * dz;
    return field.ambient_speed * field.peak_fraction() * std::exp(-r2 / (2.0 * sigma * sigma));
}

WindField WindField::sheared(ShearedField shear) {
    WindField f;
    f.shear_ = std::move(shear);
    return f;
}

WindField WindField::wake(WakeField wake, double offset_start, double offset_end,
                          double drift_duration) {
    ShearedField uniform;
    uniform.hub_speed = StepSchedule::constant(wake.ambient_speed);
    uniform.shear_exponent = 0.0;
    uniform.hub_height = wake.hub_height;
    return composite(std::move(uniform), std::move(wake), offset_start, offset_end,
                     drift_duration);
}

WindField WindField::composite(ShearedField shear, WakeField wake, double offset_start,
                               double offset_end, double drift_duration) {
    wake.validate();
    if (!(drift_duration > 0.0)) throw std::invalid_argument("wake drift duration must be > 0");
    WindField f;
    f.shear_ = std::move(shear);
    f.wake_ = std::move(wake);
    f.offset_start_ = offset_start;
    f.offset_end_ = offset_end;
    f.drift_duration_ = drift_duration;
    return f;
}

double WindField::wake_offset(double t) const {
    const double s = std::clamp(t / drift_duration_, 0.0, 1.0);
    return offset_start_ + s * (offset_end_ - offset_start_);
}

std::optional<WakeField> WindField::wake_at(double t) const {
    if (!wake_) return std::nullopt;
    WakeField w = *wake_;
    w.crosswind_offset = wake_offset(t);
    return w;
}

double sample_velocity(const ShearedField& field, double /*y*/, double z, double t) {
    if (!(z > 0.0)) throw std::invalid_argument("sample_velocity: z must be > 0");
    return std::max(0.0, power_law_speed(field, z, t));
}

double sample_velocity(const WakeField& field, double y, double z, double /*t*/) {
    if (!(z > 0.0)) throw std::invalid_argument("sample_velocity: z must be > 0");
    return std::max(0.0, field.ambient_speed - wake_deficit(field, y, z));
}

double sample_velocity(const WindField& field, double y, double z, double t) {
    if (!(z > 0.0)) throw std::invalid_argument("sample_velocity: z must be > 0");
    double u = power_law_speed(field.shear(), z, t);
    if (auto w = field.wake_at(t)) u -= wake_deficit(*w, y, z);
    return std::max(0.0, u);
}

}  // namespace spre
