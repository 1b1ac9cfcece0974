#pragma once

#include <Eigen/Dense>

namespace spre {

// Periodic uniform B-splines over one revolution sampled at P stations.
// Lifted vectors are station-major (the `channels` values of station 0, then
// station 1, ...) so the multi-channel basis is Phi (x) I_channels.
struct SplineBasis {
    Eigen::MatrixXd phi_scalar;       // P x N_b
    Eigen::MatrixXd phi_scalar_pinv;  // N_b x P
    int n_splines = 0;
    int degree = 0;
    int period = 0;
    int channels = 0;

    // Full multi-channel matrices.
    Eigen::MatrixXd phi() const;       // cP x cN_b
    Eigen::MatrixXd phi_pinv() const;  // cN_b x cP
    // phi with rows advanced by `lead` stations: row s evaluates station s+lead.
    Eigen::MatrixXd phi_lead(int lead) const;

    int coeff_size() const { return channels * n_splines; }
};

// Cardinal B-spline of the given degree on integer knots, support [0, degree+1).
double cardinal_bspline(int degree, double t);

// Throws std::invalid_argument unless N_b >= N_k + 1 and P >= N_b.
SplineBasis build_basis(int n_splines, int degree, int period, int channels = 3);

// Station-th channel block of phi * theta.
Eigen::VectorXd synthesize(const Eigen::VectorXd& theta, const SplineBasis& basis, int station);

// phi^+ Y: least-squares spline coefficients of a lifted vector.
Eigen::VectorXd project(const Eigen::VectorXd& lifted, const SplineBasis& basis);

}  // namespace spre
