#include "spre/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace spre::kernels {

namespace {

// One table node: m from the surrogate at uniform inflow, normalised back to C_m.
inline double cone_node(const ConeSurface& s, const TurbineGeometry& geom,
                        const AirProperties& air, double tsr, double pitch, double speed,
                        double psi) {
    const double q = 0.5 * air.density * geom.rotor_area * geom.rotor_radius;
    const double moment = q * speed * speed * surface_eval(s, tsr, pitch, psi);
    return moment / (q * speed * speed);
}

inline void check_cone_out(const ConeGrid& grid, std::span<double> out) {
    if (out.size() != ConeTable::value_count(grid)) {
        throw std::invalid_argument("fill_cone_values: output size mismatch");
    }
}

// Column c of (I - G) X = B, rows in order.
inline void substitute_column(const Eigen::MatrixXd& g, Eigen::MatrixXd& x, Eigen::Index c,
                              int block, int band) {
    const Eigen::Index n = g.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index row_block = i / block;
        const Eigen::Index j0 = std::max<Eigen::Index>(0, (row_block - band) * block);
        const Eigen::Index j1 = row_block * block;  // strictly below the diagonal block
        double acc = x(i, c);
        for (Eigen::Index j = j0; j < j1; ++j) acc += g(i, j) * x(j, c);
        x(i, c) = acc;
    }
}

inline void check_substitute(const Eigen::MatrixXd& g, const Eigen::MatrixXd& x, int block) {
    if (g.rows() != g.cols() || g.rows() != x.rows() || block <= 0 || g.rows() % block != 0) {
        throw std::invalid_argument("forward_substitute: dimension mismatch");
    }
}

}  // namespace

namespace serial {

void fill_cone_values(const ConeSurface& s, const TurbineGeometry& geom,
                      const AirProperties& air, const ConeGrid& grid, std::span<double> out) {
    check_cone_out(grid, out);
    const std::size_t nl = grid.tsr.size(), nb = grid.pitch.size(), nu = grid.speed.size();
    const std::size_t np = static_cast<std::size_t>(grid.n_psi);
    std::size_t idx = 0;
    for (int blade = 0; blade < kBlades; ++blade)
        for (std::size_t a = 0; a < nl; ++a)
            for (std::size_t b = 0; b < nb; ++b)
                for (std::size_t u = 0; u < nu; ++u)
                    for (std::size_t k = 0; k < np; ++k)
                        out[idx++] = cone_node(s, geom, air, grid.tsr[a], grid.pitch[b],
                                               grid.speed[u], kTwoPi * k / grid.n_psi);
}

void forward_substitute(const Eigen::MatrixXd& g, Eigen::MatrixXd& x, int block, int band) {
    check_substitute(g, x, block);
    for (Eigen::Index c = 0; c < x.cols(); ++c) substitute_column(g, x, c, block, band);
}

void sample_plane(const WindField& field, std::span<const double> ys, std::span<const double> zs,
                  double t, std::span<double> out) {
    if (out.size() != ys.size() * zs.size()) throw std::invalid_argument("sample_plane: size");
    for (std::size_t i = 0; i < zs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j)
            out[i * ys.size() + j] = sample_velocity(field, ys[j], zs[i], t);
}

}  // namespace serial

namespace omp {

void fill_cone_values(const ConeSurface& s, const TurbineGeometry& geom,
                      const AirProperties& air, const ConeGrid& grid, std::span<double> out) {
    check_cone_out(grid, out);
    const long nl = static_cast<long>(grid.tsr.size());
    const long nb = static_cast<long>(grid.pitch.size());
    const long nu = static_cast<long>(grid.speed.size());
    const long np = grid.n_psi;
    const long outer = kBlades * nl;
#pragma omp parallel for schedule(static)
    for (long ba = 0; ba < outer; ++ba) {
        const long a = ba % nl;
        std::size_t idx = static_cast<std::size_t>(ba) * nb * nu * np;
        for (long b = 0; b < nb; ++b)
            for (long u = 0; u < nu; ++u)
                for (long k = 0; k < np; ++k)
                    out[idx++] = cone_node(s, geom, air, grid.tsr[a], grid.pitch[b],
                                           grid.speed[u], kTwoPi * k / grid.n_psi);
    }
}

void forward_substitute(const Eigen::MatrixXd& g, Eigen::MatrixXd& x, int block, int band) {
    check_substitute(g, x, block);
    const Eigen::Index nc = x.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index c = 0; c < nc; ++c) substitute_column(g, x, c, block, band);
}

void sample_plane(const WindField& field, std::span<const double> ys, std::span<const double> zs,
                  double t, std::span<double> out) {
    if (out.size() != ys.size() * zs.size()) throw std::invalid_argument("sample_plane: size");
    const long nz = static_cast<long>(zs.size());
    const std::size_t ny = ys.size();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nz; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            out[static_cast<std::size_t>(i) * ny + j] = sample_velocity(field, ys[j], zs[i], t);
}

}  // namespace omp

}  // namespace spre::kernels
