#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "spre/bspline.hpp"
#include "spre/lifting.hpp"

namespace spre {

// Per-revolution model in spline coordinates, state K = [Ybar; dtheta; dYbar]:
//   K_{j+1} = a_bar K_j + b_hat dtheta_{j+1}
struct ReducedModel {
    Eigen::MatrixXd a_bar;
    Eigen::MatrixXd b_hat;
    int output_dim = 0;  // l N_b
    int input_dim = 0;   // r N_b

    int state_dim() const { return 2 * output_dim + input_dim; }
};

// `input_lead` is the number of stations by which an applied input leads the
// station it is synthesised for (the estimator emits the speed for the next
// station, so it uses 1).
ReducedModel reduce_model(const LiftedModel& lifted, const SplineBasis& basis, int input_lead = 0);

struct PredictionMatrices {
    Eigen::MatrixXd big_a;  // (N_p+1) n x n
    Eigen::MatrixXd big_b;  // (N_p+1) n x N_u m
    int horizon_pred = 0, horizon_est = 0;
};

// X = big_a K_j + big_b U with U = [dtheta_{j+1}; ...; dtheta_{j+N_u}] and the
// last move held for the rest of the horizon.
PredictionMatrices build_prediction(const ReducedModel& model, int horizon_pred, int horizon_est);

struct QpWeights {
    double q_output = 1.0;
    double q_theta = 1e-2;
    double q_doutput = 1.0;
    double r_input = 1e-1;
};

struct QpProblem {
    Eigen::MatrixXd h;  // B^T Q B + R
    Eigen::MatrixXd f;  // A^T Q B
    Eigen::VectorXd q_diag;
    Eigen::VectorXd r_diag;
};

QpProblem build_qp(const PredictionMatrices& pred, const ReducedModel& model, const QpWeights& w);

class QpFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// U* = -H^{-1} F^T K via Cholesky; throws QpFailure when H is not numerically
// positive definite or the result is not finite.
Eigen::VectorXd solve_horizon(const QpProblem& qp, const Eigen::VectorXd& kbar);

struct EstimatorState {
    Eigen::VectorXd theta;       // theta_j, r N_b
    Eigen::VectorXd theta_prev;  // theta_{j-1}
    Eigen::VectorXd ybar_prev;   // Ybar_{j-1}
    long revolution = 0;         // j
    bool has_history = false;

    static EstimatorState zero(const SplineBasis& basis);
};

enum class SolveStatus { passive, ok, frozen };

struct AdvanceResult {
    EstimatorState state;
    Eigen::VectorXd kbar;
    Eigen::VectorXd delta_theta;  // dtheta_{j+1}
    SolveStatus status = SolveStatus::passive;
};

struct HorizonSpec {
    int horizon_pred = 3;
    int horizon_est = 2;
    int input_lead = 1;
};

// Closes revolution j: assembles K_j from the measured lifted output Y_j,
// solves the horizon problem and applies the first move. With active=false
// the history is tracked but theta is held (warm-up).
AdvanceResult advance(const EstimatorState& state, const LiftedModel& lifted,
                      const SplineBasis& basis, const QpWeights& weights, const HorizonSpec& horizon,
                      const Eigen::VectorXd& lifted_output, bool active = true);

Eigen::VectorXd assemble_state(const EstimatorState& state, const Eigen::VectorXd& ybar);

// prior + synthesised correction per blade, floored at 1 m/s.
Eigen::VectorXd estimate_bews(const Eigen::VectorXd& theta, const SplineBasis& basis, int station,
                              double prior);

}  // namespace spre
