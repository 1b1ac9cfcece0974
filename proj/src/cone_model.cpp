#include "spre/cone_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "spre/kernels.hpp"

namespace spre {

double ConeSurface::base(double tsr, double pitch) const {
    const double c = std::cos(pitch);
    return c_a * tsr * std::exp(-tsr / lambda_c) * c * c * c;
}

void ConeSurface::validate() const {
    std::vector<std::string> v;
    if (!(c_a > 0.0)) v.emplace_back("cone surface c_a must be > 0");
    if (!(lambda_c > 0.0)) v.emplace_back("cone surface lambda_c must be > 0");
    if (!(eps_gravity >= 0.0 && eps_gravity <= 0.2)) v.emplace_back("eps_gravity must be in [0, 0.2]");
    if (!(eps_tower >= 0.0 && eps_tower <= 0.2)) v.emplace_back("eps_tower must be in [0, 0.2]");
    if (!(tower_width > 0.0)) v.emplace_back("tower_width must be > 0");
    if (!v.empty()) throw ConfigError(std::move(v));
}

double surface_eval(const ConeSurface& s, double tsr, double pitch, double psi) {
    if (!(tsr > 0.0)) throw std::invalid_argument("surface_eval: tsr must be > 0");
    // angular distance from the downward (tower) position
    const double d = std::abs(wrap_angle(psi) - kPi);
    const double dip = 1.0 - s.eps_tower * std::exp(-(d / s.tower_width) * (d / s.tower_width));
    return s.base(tsr, pitch) * (1.0 + s.eps_gravity * std::cos(psi)) * dip;
}

namespace {

std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> v;
    const int n = static_cast<int>(std::lround((hi - lo) / step));
    for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
    return v;
}

void check_axis(const std::vector<double>& axis, const char* name, std::vector<std::string>& v) {
    if (axis.empty()) {
        v.emplace_back(std::string("cone grid axis '") + name + "' is empty");
        return;
    }
    for (std::size_t i = 1; i < axis.size(); ++i) {
        if (!(axis[i] > axis[i - 1])) {
            v.emplace_back(std::string("cone grid axis '") + name + "' must be strictly increasing");
            return;
        }
    }
}

struct Bracket {
    std::size_t i0, i1;
    double w;  // weight of i1
};

// Clamped linear bracket on a sorted axis; exact weights 0 or 1 at nodes.
Bracket bracket(const std::vector<double>& axis, double x) {
    const std::size_t n = axis.size();
    if (n == 1 || x <= axis.front()) return {0, 0, 0.0};
    if (x >= axis.back()) return {n - 1, n - 1, 0.0};
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t i1 = static_cast<std::size_t>(it - axis.begin());
    const std::size_t i0 = i1 - 1;
    return {i0, i1, (x - axis[i0]) / (axis[i1] - axis[i0])};
}

}  // namespace

ConeGrid ConeGrid::defaults() {
    ConeGrid g;
    g.tsr = arange(3.0, 12.0, 0.5);
    g.pitch.clear();
    for (int d = 0; d <= 25; ++d) g.pitch.push_back(deg2rad(d));
    g.speed = arange(6.0, 16.0, 2.0);
    g.n_psi = 24;
    return g;
}

void ConeGrid::validate() const {
    std::vector<std::string> v;
    check_axis(tsr, "tsr", v);
    check_axis(pitch, "pitch", v);
    check_axis(speed, "speed", v);
    if (n_psi < 1) v.emplace_back("cone grid axis 'psi' is empty");
    if (!tsr.empty() && !(tsr.front() > 0.0)) v.emplace_back("cone grid tsr must be > 0");
    if (!v.empty()) throw ConfigError(std::move(v));
}

ConeTable::ConeTable(ConeGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != value_count(grid_)) {
        throw std::invalid_argument("ConeTable: value count does not match grid");
    }
    for (double x : values_) {
        if (!std::isfinite(x) || !(x > 0.0)) {
            throw std::invalid_argument("ConeTable: values must be finite and positive");
        }
    }
}

std::size_t ConeTable::index(int blade, std::size_t i_tsr, std::size_t i_pitch,
                             std::size_t i_speed, std::size_t i_psi) const {
    const std::size_t nb = grid_.pitch.size(), nu = grid_.speed.size();
    const std::size_t np = static_cast<std::size_t>(grid_.n_psi);
    return (((static_cast<std::size_t>(blade) * grid_.tsr.size() + i_tsr) * nb + i_pitch) * nu +
            i_speed) * np + i_psi;
}

ConeTable build_table(const ConeSurface& s, const TurbineGeometry& geom, const AirProperties& air,
                      const ConeGrid& grid, Exec exec) {
    s.validate();
    geom.validate();
    air.validate();
    grid.validate();
    std::vector<double> values(ConeTable::value_count(grid));
    if (exec == Exec::parallel) {
        kernels::omp::fill_cone_values(s, geom, air, grid, values);
    } else {
        kernels::serial::fill_cone_values(s, geom, air, grid, values);
    }
    return ConeTable(grid, std::move(values));
}

double lookup_cm(const ConeTable& t, double tsr, double pitch, double speed, double psi,
                 int blade) {
    const ConeGrid& g = t.grid();
    const Bracket bl = bracket(g.tsr, tsr);
    const Bracket bb = bracket(g.pitch, pitch);
    const Bracket bu = bracket(g.speed, speed);

    const double pos = wrap_angle(psi) / kTwoPi * g.n_psi;
    std::size_t k0 = static_cast<std::size_t>(std::floor(pos));
    double wk = pos - static_cast<double>(k0);
    if (k0 >= static_cast<std::size_t>(g.n_psi)) {
        k0 = 0;
        wk = 0.0;
    }
    const std::size_t k1 = (k0 + 1) % static_cast<std::size_t>(g.n_psi);

    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const double wa = a ? bl.w : 1.0 - bl.w;
        if (wa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const double wb = b ? bb.w : 1.0 - bb.w;
            if (wb == 0.0) continue;
            for (int u = 0; u < 2; ++u) {
                const double wu = u ? bu.w : 1.0 - bu.w;
                if (wu == 0.0) continue;
                const std::size_t ia = a ? bl.i1 : bl.i0;
                const std::size_t ib = b ? bb.i1 : bb.i0;
                const std::size_t iu = u ? bu.i1 : bu.i0;
                const double v0 = t.node(blade, ia, ib, iu, k0);
                const double v1 = t.node(blade, ia, ib, iu, k1);
                const double vpsi = wk == 0.0 ? v0 : (1.0 - wk) * v0 + wk * v1;
                acc += wa * wb * wu * vpsi;
            }
        }
    }
    return acc;
}

double predict_moop(double speed, double rotor_speed, double pitch, double psi, int blade,
                    const ConeTable& t, const TurbineGeometry& geom, const AirProperties& air) {
    if (!(speed > 0.0)) throw std::invalid_argument("predict_moop: speed must be > 0");
    const double tsr = rotor_speed * geom.rotor_radius / speed;
    const double q = 0.5 * air.density * geom.rotor_area * geom.rotor_radius;
    return q * speed * speed * lookup_cm(t, tsr, pitch, speed, psi, blade);
}

double static_invert_moop(double moment, double rotor_speed, double pitch, double psi, int blade,
                          const ConeTable& t, const TurbineGeometry& geom,
                          const AirProperties& air, const InvertOptions& opt) {
    if (!(moment > 0.0) || !std::isfinite(moment)) {
        throw NonInvertible("static_invert_moop: moment must be finite and > 0");
    }
    auto f = [&](double u) {
        return predict_moop(u, rotor_speed, pitch, psi, blade, t, geom, air) - moment;
    };
    if (opt.monotone_samples > 1) {
        double prev = f(opt.lo);
        for (int i = 1; i <= opt.monotone_samples; ++i) {
            const double u = opt.lo + (opt.hi - opt.lo) * i / opt.monotone_samples;
            const double cur = f(u);
            if (!(cur > prev)) throw NonInvertible("static_invert_moop: moment not monotone in speed");
            prev = cur;
        }
    }
    double lo = opt.lo, hi = opt.hi;
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) {
        throw NonInvertible("static_invert_moop: no sign change in speed bracket");
    }
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

void write_axis(std::ostream& os, const char* name, const std::vector<double>& axis) {
    os << name << ',' << axis.size();
    for (double x : axis) os << ',' << x;
    os << '\n';
}

std::vector<double> read_axis(std::istream& is, const std::string& name) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("cone table: truncated header");
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    if (field != name) throw std::runtime_error("cone table: expected axis '" + name + "'");
    std::getline(ls, field, ',');
    const std::size_t n = std::stoul(field);
    std::vector<double> axis;
    while (std::getline(ls, field, ',')) axis.push_back(std::stod(field));
    if (axis.size() != n) throw std::runtime_error("cone table: axis '" + name + "' count mismatch");
    return axis;
}

constexpr const char* kTableMagic = "# spre-cone-table v1";

}  // namespace

void write_table(const ConeTable& t, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write cone table: " + path.string());
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    const ConeGrid& g = t.grid();
    os << kTableMagic << '\n';
    os << "blades," << kBlades << '\n';
    write_axis(os, "tsr", g.tsr);
    write_axis(os, "pitch_rad", g.pitch);
    write_axis(os, "speed", g.speed);
    os << "psi_nodes," << g.n_psi << '\n';
    const auto& v = t.values();
    const std::size_t np = static_cast<std::size_t>(g.n_psi);
    for (std::size_t row = 0; row < v.size() / np; ++row) {
        for (std::size_t k = 0; k < np; ++k) os << (k ? "," : "") << v[row * np + k];
        os << '\n';
    }
    if (!os) throw std::runtime_error("cone table: write failed: " + path.string());
}

ConeTable read_table(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read cone table: " + path.string());
    std::string line;
    std::getline(is, line);
    if (line != kTableMagic) throw std::runtime_error("cone table: unsupported format");
    std::getline(is, line);
    if (line != "blades,3") throw std::runtime_error("cone table: expected 3 blades");
    ConeGrid g;
    g.tsr = read_axis(is, "tsr");
    g.pitch = read_axis(is, "pitch_rad");
    g.speed = read_axis(is, "speed");
    std::getline(is, line);
    if (line.rfind("psi_nodes,", 0) != 0) throw std::runtime_error("cone table: expected psi_nodes");
    g.n_psi = std::stoi(line.substr(10));
    g.validate();
    std::vector<double> values;
    values.reserve(ConeTable::value_count(g));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) values.push_back(std::stod(field));
    }
    return ConeTable(std::move(g), std::move(values));
}

}  // namespace spre
