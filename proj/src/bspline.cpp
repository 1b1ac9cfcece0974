#include "spre/bspline.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spre {

double cardinal_bspline(int degree, double t) {
    if (t < 0.0 || t >= degree + 1.0) return 0.0;
    // Cox-de Boor on knots 0, 1, ..., degree+1
    std::vector<double> n(static_cast<std::size_t>(degree) + 1, 0.0);
    for (int i = 0; i <= degree; ++i) n[static_cast<std::size_t>(i)] = (t >= i && t < i + 1) ? 1.0 : 0.0;
    for (int d = 1; d <= degree; ++d) {
        for (int i = 0; i + d <= degree; ++i) {
            const double left = (t - i) / d * n[static_cast<std::size_t>(i)];
            const double right = (i + d + 1 - t) / d * n[static_cast<std::size_t>(i) + 1];
            n[static_cast<std::size_t>(i)] = left + right;
        }
    }
    return n[0];
}

SplineBasis build_basis(int n_splines, int degree, int period, int channels) {
    if (degree < 0 || n_splines < degree + 1 || period < n_splines || channels < 1) {
        throw std::invalid_argument("build_basis: need N_b >= N_k+1, P >= N_b, channels >= 1");
    }
    SplineBasis b;
    b.n_splines = n_splines;
    b.degree = degree;
    b.period = period;
    b.channels = channels;
    b.phi_scalar.resize(period, n_splines);
    const double spacing = static_cast<double>(period) / n_splines;
    for (int s = 0; s < period; ++s) {
        for (int j = 0; j < n_splines; ++j) {
            double t = std::fmod(s / spacing - j, static_cast<double>(n_splines));
            if (t < 0.0) t += n_splines;
            b.phi_scalar(s, j) = cardinal_bspline(degree, t);
        }
    }
    const Eigen::MatrixXd gram = b.phi_scalar.transpose() * b.phi_scalar;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("build_basis: Gram matrix not SPD");
    b.phi_scalar_pinv = llt.solve(b.phi_scalar.transpose());
    return b;
}

namespace {

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& a, int c) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() * c, a.cols() * c);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (int k = 0; k < c; ++k) out(i * c + k, j * c + k) = a(i, j);
    return out;
}

}  // namespace

Eigen::MatrixXd SplineBasis::phi() const { return kron_identity(phi_scalar, channels); }
Eigen::MatrixXd SplineBasis::phi_pinv() const { return kron_identity(phi_scalar_pinv, channels); }

Eigen::MatrixXd SplineBasis::phi_lead(int lead) const {
    Eigen::MatrixXd rolled(period, n_splines);
    for (int s = 0; s < period; ++s) {
        const int src = ((s + lead) % period + period) % period;
        rolled.row(s) = phi_scalar.row(src);
    }
    return kron_identity(rolled, channels);
}

Eigen::VectorXd synthesize(const Eigen::VectorXd& theta, const SplineBasis& basis, int station) {
    if (station < 0 || station >= basis.period) throw std::out_of_range("synthesize: station out of range");
    if (theta.size() != basis.coeff_size()) throw std::invalid_argument("synthesize: theta size mismatch");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(basis.channels);
    for (int j = 0; j < basis.n_splines; ++j) {
        const double w = basis.phi_scalar(station, j);
        if (w != 0.0) u += w * theta.segment(j * basis.channels, basis.channels);
    }
    return u;
}

Eigen::VectorXd project(const Eigen::VectorXd& lifted, const SplineBasis& basis) {
    if (lifted.size() != basis.channels * basis.period) {
        throw std::invalid_argument("project: lifted vector must have channels*P entries");
    }
    const Eigen::Map<const Eigen::MatrixXd> y(lifted.data(), basis.channels, basis.period);
    const Eigen::MatrixXd coeffs = y * basis.phi_scalar_pinv.transpose();  // channels x N_b
    return Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size());
}

}  // namespace spre
