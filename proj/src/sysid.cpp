#include "spre/sysid.hpp"

#include <cmath>
#include <stdexcept>

namespace spre {

PeriodicBuffer::PeriodicBuffer(int period, int past_window, int n_inputs, int n_outputs)
    : period_(period), past_(past_window), r_(n_inputs), l_(n_outputs) {
    if (past_window < 1 || period < past_window || n_inputs < 1 || n_outputs < 1) {
        throw std::invalid_argument("PeriodicBuffer: need P >= p >= 1 and positive sizes");
    }
    u_hist_.assign(static_cast<std::size_t>(period_ + past_), Eigen::VectorXd::Zero(r_));
    y_hist_.assign(static_cast<std::size_t>(period_ + past_), Eigen::VectorXd::Zero(l_));
    du_hist_.assign(static_cast<std::size_t>(past_ + 1), Eigen::VectorXd::Zero(r_));
    dy_hist_.assign(static_cast<std::size_t>(past_ + 1), Eigen::VectorXd::Zero(l_));
}

std::optional<PeriodicBuffer::Delta> PeriodicBuffer::push(const Eigen::VectorXd& u,
                                                          const Eigen::VectorXd& y) {
    if (u.size() != r_ || y.size() != l_) throw std::invalid_argument("PeriodicBuffer: size mismatch");
    if (!u.allFinite() || !y.allFinite()) throw std::invalid_argument("PeriodicBuffer: non-finite sample");

    const long cap = period_ + past_;
    const std::size_t slot = static_cast<std::size_t>(n_samples_ % cap);
    u_hist_[slot] = u;
    y_hist_[slot] = y;
    ++n_samples_;
    if (n_samples_ <= period_) return std::nullopt;

    const std::size_t old = static_cast<std::size_t>((n_samples_ - 1 - period_) % cap);
    Delta d{u - u_hist_[old], y - y_hist_[old]};
    const std::size_t dslot = static_cast<std::size_t>(n_deltas_ % (past_ + 1));
    du_hist_[dslot] = d.du;
    dy_hist_[dslot] = d.dy;
    ++n_deltas_;
    return d;
}

Eigen::VectorXd PeriodicBuffer::regressor() const {
    if (!regressor_ready()) throw std::logic_error("PeriodicBuffer: insufficient history for regressor");
    Eigen::VectorXd phi((r_ + l_) * past_);
    const long latest = n_deltas_ - 1;
    for (int j = 0; j < past_; ++j) {
        // block j holds delta index latest - p + j
        const std::size_t slot = static_cast<std::size_t>((latest - past_ + j) % (past_ + 1));
        phi.segment(j * r_, r_) = du_hist_[slot];
        phi.segment(r_ * past_ + j * l_, l_) = dy_hist_[slot];
    }
    return phi;
}

MarkovEstimate init_markov(int past_window, int n_inputs, int n_outputs, double ridge,
                           double forgetting) {
    if (!(ridge > 0.0)) throw std::invalid_argument("init_markov: ridge must be > 0");
    if (!(forgetting > 0.0 && forgetting <= 1.0)) {
        throw std::invalid_argument("init_markov: forgetting must satisfy 0<γ≤1");
    }
    if (past_window < 1 || n_inputs < 1 || n_outputs < 1) {
        throw std::invalid_argument("init_markov: sizes must be positive");
    }
    const int n = (n_inputs + n_outputs) * past_window;
    MarkovEstimate e;
    e.xi = Eigen::MatrixXd::Zero(n_outputs, n);
    e.sqrt_info = std::sqrt(ridge) * Eigen::MatrixXd::Identity(n, n);
    e.rhs = Eigen::MatrixXd::Zero(n, n_outputs);
    e.forgetting = forgetting;
    e.past_window = past_window;
    e.n_inputs = n_inputs;
    e.n_outputs = n_outputs;
    return e;
}

void rls_update(MarkovEstimate& est, const Eigen::VectorXd& regressor, const Eigen::VectorXd& dy) {
    const Eigen::Index n = est.sqrt_info.rows();
    const Eigen::Index l = est.rhs.cols();
    if (regressor.size() != n || dy.size() != l) throw std::invalid_argument("rls_update: size mismatch");
    if (!regressor.allFinite() || !dy.allFinite()) {
        throw std::invalid_argument("rls_update: non-finite regressor or target");
    }

    if (est.forgetting != 1.0) {
        const double s = std::sqrt(est.forgetting);
        est.sqrt_info.triangularView<Eigen::Upper>() *= s;
        est.rhs *= s;
    }

    // Annihilate the appended row [phi^T | dy^T] against R one column at a time.
    Eigen::RowVectorXd row = regressor.transpose();
    Eigen::RowVectorXd trow = dy.transpose();
    Eigen::MatrixXd& R = est.sqrt_info;
    Eigen::MatrixXd& Z = est.rhs;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b = row(i);
        if (b == 0.0) continue;
        const double a = R(i, i);
        const double rho = std::hypot(a, b);
        const double c = a / rho;
        const double s = b / rho;
        R(i, i) = rho;
        row(i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double rij = R(i, j);
            const double xj = row(j);
            R(i, j) = c * rij + s * xj;
            row(j) = -s * rij + c * xj;
        }
        for (Eigen::Index j = 0; j < l; ++j) {
            const double zij = Z(i, j);
            const double tj = trow(j);
            Z(i, j) = c * zij + s * tj;
            trow(j) = -s * zij + c * tj;
        }
    }
    ++est.samples;
    est.xi = R.triangularView<Eigen::Upper>().solve(Z).transpose();
}

}  // namespace spre
