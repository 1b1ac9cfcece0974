#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant with identical per-element arithmetic, so the two agree
// bit for bit; tests compare them and bench/ times them.

#include <span>

#include <Eigen/Dense>

#include "spre/cone_model.hpp"
#include "spre/windfield.hpp"

namespace spre::kernels {

namespace serial {

void fill_cone_values(const ConeSurface& s, const TurbineGeometry& geom,
                      const AirProperties& air, const ConeGrid& grid, std::span<double> out);

// Solves (I - G) X = B in place (X holds B on entry). G is strictly block
// lower triangular with block size `block` and nonzero blocks only within
// `band` block diagonals below the main one.
void forward_substitute(const Eigen::MatrixXd& g, Eigen::MatrixXd& x, int block, int band);

// out[i * ys.size() + j] = sample_velocity(field, ys[j], zs[i], t)
void sample_plane(const WindField& field, std::span<const double> ys, std::span<const double> zs,
                  double t, std::span<double> out);

}  // namespace serial

namespace omp {

void fill_cone_values(const ConeSurface& s, const TurbineGeometry& geom,
                      const AirProperties& air, const ConeGrid& grid, std::span<double> out);
void forward_substitute(const Eigen::MatrixXd& g, Eigen::MatrixXd& x, int block, int band);
void sample_plane(const WindField& field, std::span<const double> ys, std::span<const double> zs,
                  double t, std::span<double> out);

}  // namespace omp

}  // namespace spre::kernels
