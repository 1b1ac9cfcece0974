#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "spre/core.hpp"

namespace spre {

// Analytic stand-in for the steady-state cone coefficient surface.
//   c0(lambda, beta) = c_a * lambda * exp(-lambda / lambda_c) * cos(beta)^3
// modulated once per revolution by gravity and by the tower-shadow dip at psi = pi.
struct ConeSurface {
    double c_a = 0.08 * std::numbers::e / 7.5;  // c0 peaks at 0.08 for lambda = lambda_c
    double lambda_c = 7.5;
    double eps_gravity = 0.05;
    double eps_tower = 0.05;
    double tower_width = 0.35;  // [rad]

    double base(double tsr, double pitch) const;
    void validate() const;
};

double surface_eval(const ConeSurface& s, double tsr, double pitch, double psi);

// Grid axes; pitch in radians, psi as a node count over [0, 2pi).
struct ConeGrid {
    std::vector<double> tsr;
    std::vector<double> pitch;
    std::vector<double> speed;
    int n_psi = 24;

    static ConeGrid defaults();
    void validate() const;
};

class ConeTable {
public:
    ConeTable() = default;
    ConeTable(ConeGrid grid, std::vector<double> values);

    const ConeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double psi_node(int k) const { return kTwoPi * k / grid_.n_psi; }

    std::size_t index(int blade, std::size_t i_tsr, std::size_t i_pitch, std::size_t i_speed,
                      std::size_t i_psi) const;
    double node(int blade, std::size_t i_tsr, std::size_t i_pitch, std::size_t i_speed,
                std::size_t i_psi) const {
        return values_[index(blade, i_tsr, i_pitch, i_speed, i_psi)];
    }

    static std::size_t value_count(const ConeGrid& g) {
        return static_cast<std::size_t>(kBlades) * g.tsr.size() * g.pitch.size() * g.speed.size() *
               static_cast<std::size_t>(g.n_psi);
    }

private:
    ConeGrid grid_;
    std::vector<double> values_;  // [blade][tsr][pitch][speed][psi]
};

enum class Exec { serial, parallel };

ConeTable build_table(const ConeSurface& s, const TurbineGeometry& geom, const AirProperties& air,
                      const ConeGrid& grid, Exec exec = Exec::parallel);

// Multilinear over (tsr, pitch, speed) clamped to the hull, periodic-linear over psi.
double lookup_cm(const ConeTable& t, double tsr, double pitch, double speed, double psi,
                 int blade);

// Predicted blade-root out-of-plane moment 0.5*rho*A*R*U^2*C_m(omega R / U, beta, U, psi).
double predict_moop(double speed, double rotor_speed, double pitch, double psi, int blade,
                    const ConeTable& t, const TurbineGeometry& geom, const AirProperties& air);

class NonInvertible : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct InvertOptions {
    double lo = 2.0;   // [m/s]
    double hi = 30.0;  // [m/s]
    double tol = 1e-7;
    int monotone_samples = 64;  // 0 skips the pre-check
};

// Bisection inverse of predict_moop in the speed.
double static_invert_moop(double moment, double rotor_speed, double pitch, double psi, int blade,
                          const ConeTable& t, const TurbineGeometry& geom,
                          const AirProperties& air, const InvertOptions& opt = {});

// Table file: text header with axes, then one row of psi values per
// (blade, tsr, pitch, speed) node in row-major order.
void write_table(const ConeTable& t, const std::filesystem::path& path);
ConeTable read_table(const std::filesystem::path& path);

}  // namespace spre
