#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace spre {

// Ring buffer of the last P + p input/output samples. Each push returns the
// period-P differences once P samples have been seen; the last p differences
// are retained for the stacked regressor.
class PeriodicBuffer {
public:
    struct Delta {
        Eigen::VectorXd du;
        Eigen::VectorXd dy;
    };

    PeriodicBuffer(int period, int past_window, int n_inputs, int n_outputs);

    // Throws std::invalid_argument for non-finite input or wrong sizes;
    // returns nullopt while warming up.
    std::optional<Delta> push(const Eigen::VectorXd& u, const Eigen::VectorXd& y);

    // True once the p differences preceding the latest one are available.
    bool regressor_ready() const { return n_deltas_ > past_; }

    // [du_{k-p}; ...; du_{k-1}; dy_{k-p}; ...; dy_{k-1}], oldest first, where k
    // is the latest pushed sample.
    Eigen::VectorXd regressor() const;

    int period() const { return period_; }
    int past_window() const { return past_; }
    int n_inputs() const { return r_; }
    int n_outputs() const { return l_; }
    long samples() const { return n_samples_; }

private:
    int period_, past_, r_, l_;
    long n_samples_ = 0;
    long n_deltas_ = 0;
    std::vector<Eigen::VectorXd> u_hist_, y_hist_;    // capacity P + p
    std::vector<Eigen::VectorXd> du_hist_, dy_hist_;  // capacity p + 1
};

// Recursive estimate of the Markov matrix Xi (l x (r+l)p) from the
// square-root (QR) information form R * Xi^T = Z, R upper triangular.
struct MarkovEstimate {
    Eigen::MatrixXd xi;
    Eigen::MatrixXd sqrt_info;  // R, upper triangular, nonnegative diagonal
    Eigen::MatrixXd rhs;        // Z
    long samples = 0;
    double forgetting = 1.0;
    int past_window = 0, n_inputs = 0, n_outputs = 0;

    Eigen::VectorXd predict(const Eigen::VectorXd& regressor) const { return xi * regressor; }
};

// Xi = 0, R = sqrt(ridge) * I. Throws for ridge <= 0 or forgetting outside (0, 1].
MarkovEstimate init_markov(int past_window, int n_inputs, int n_outputs, double ridge,
                           double forgetting = 1.0);

// One exponentially weighted least-squares step via Givens rotations.
void rls_update(MarkovEstimate& est, const Eigen::VectorXd& regressor, const Eigen::VectorXd& dy);

}  // namespace spre
