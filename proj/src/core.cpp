#include "spre/core.hpp"

#include <cmath>
#include <sstream>

namespace spre {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::ostringstream os;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) os << "; ";
        os << lines[i];
    }
    return os.str();
}

}  // namespace

double wrap_angle(double rad) {
    double w = std::fmod(rad, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a value just below a multiple of 2pi can round up to 2pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

std::array<double, kBlades> blade_azimuths(double psi1) {
    std::array<double, kBlades> out{};
    for (int i = 0; i < kBlades; ++i) {
        out[i] = wrap_angle(psi1 + kTwoPi * i / kBlades);
    }
    return out;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

TurbineGeometry TurbineGeometry::make(double rotor_radius, double hub_height) {
    TurbineGeometry g;
    g.rotor_radius = rotor_radius;
    g.hub_height = hub_height;
    g.rotor_area = kPi * rotor_radius * rotor_radius;
    g.validate();
    return g;
}

void TurbineGeometry::validate() const {
    std::vector<std::string> v;
    if (!(rotor_radius > 0.0)) v.emplace_back("rotor_radius must be > 0");
    if (!(hub_height > rotor_radius)) v.emplace_back("hub_height must exceed rotor_radius");
    const double area = kPi * rotor_radius * rotor_radius;
    if (!(std::abs(rotor_area - area) <= 1e-9 * area)) {
        v.emplace_back("rotor_area must equal pi*rotor_radius^2");
    }
    if (n_blades != kBlades) v.emplace_back("n_blades must be 3");
    if (!v.empty()) throw ConfigError(std::move(v));
}

void AirProperties::validate() const {
    if (!(density > 0.0)) throw ConfigError({"density must be > 0"});
}

OperatingPoint OperatingPoint::make(double rotor_speed, double psi1,
                                    const std::array<double, kBlades>& pitch,
                                    const std::array<double, kBlades>& speed,
                                    const TurbineGeometry& geom) {
    OperatingPoint op;
    op.rotor_speed = rotor_speed;
    op.azimuth = blade_azimuths(psi1);
    op.pitch = pitch;
    for (int i = 0; i < kBlades; ++i) {
        if (!(speed[i] > 0.0)) throw std::invalid_argument("OperatingPoint: speed must be > 0");
        op.tsr[i] = rotor_speed * geom.rotor_radius / speed[i];
    }
    return op;
}

SimConfig validate_config(const SimConfig& cfg) {
    std::vector<std::string> v;
    auto need = [&v](bool ok, const char* msg) {
        if (!ok) v.emplace_back(msg);
    };
    need(cfg.dt_sim > 0.0, "dt_sim must be > 0");
    need(cfg.duration > 0.0, "duration must be > 0");
    need(cfg.forgetting > 0.0 && cfg.forgetting <= 1.0, "forgetting must satisfy 0<γ≤1");
    need(cfg.past_window >= 1, "past_window must be >= 1");
    need(cfg.estimator_samples_per_rev >= cfg.past_window,
         "estimator_samples_per_rev must be >= past_window");
    need(cfg.horizon_est >= 1, "horizon_est must be >= 1");
    need(cfg.horizon_est <= cfg.horizon_pred, "horizon_est must not exceed horizon_pred");
    need(cfg.spline_degree >= 0, "spline_degree must be >= 0");
    need(cfg.n_splines >= cfg.spline_degree + 1, "n_splines must be >= spline_degree+1");
    need(cfg.n_splines <= cfg.estimator_samples_per_rev,
         "n_splines must not exceed estimator_samples_per_rev");
    need(cfg.q_output > 0.0 && cfg.q_theta > 0.0 && cfg.q_doutput > 0.0,
         "weight_state Q must be positive definite (all diagonal weights > 0)");
    need(cfg.r_input > 0.0, "weight_input R must be positive definite (r_input > 0)");
    need(cfg.prbs_amplitude >= 0.0, "prbs_amplitude must be >= 0");
    need(cfg.prbs_cutoff > 0.0, "prbs_cutoff must be > 0");
    need(cfg.rls_ridge > 0.0, "rls_ridge must be > 0");
    need(cfg.warmup_revs >= 0, "warmup_revs must be >= 0");
    need(cfg.prior_time_constant > 0.0, "prior_time_constant must be > 0");
    need(cfg.initial_speed > 0.0, "initial_speed must be > 0");
    need(cfg.moop_scale > 0.0, "moop_scale must be > 0");
    if (!v.empty()) throw ConfigError(std::move(v));
    return cfg;
}

PrbsGenerator::PrbsGenerator(std::uint64_t seed, double amplitude, double cutoff_hz, double dt)
    : rng_(seed), amplitude_(amplitude) {
    if (std::isinf(cutoff_hz)) {
        alpha_ = 1.0;
    } else {
        const double tau = 1.0 / (kTwoPi * cutoff_hz);
        alpha_ = dt / (dt + tau);
    }
}

double PrbsGenerator::next() {
    const double bit = (rng_() >> 63) ? amplitude_ : -amplitude_;
    state_ += alpha_ * (bit - state_);
    if (alpha_ == 1.0) state_ = bit;
    return state_;
}

std::vector<double> filtered_prbs(std::uint64_t seed, double amplitude, double cutoff_hz,
                                  double dt, std::size_t n) {
    PrbsGenerator gen(seed, amplitude, cutoff_hz, dt);
    std::vector<double> out(n);
    for (auto& x : out) x = gen.next();
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finalizer over the combined key
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace spre
