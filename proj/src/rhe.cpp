#include "spre/rhe.hpp"

#include <vector>

namespace spre {

ReducedModel reduce_model(const LiftedModel& lifted, const SplineBasis& basis, int input_lead) {
    const int P = lifted.period, r = lifted.n_inputs, l = lifted.n_outputs;
    if (basis.period != P || basis.channels != r || basis.channels != l ||
        lifted.gku.rows() != l * P || lifted.gku.cols() != r * P || lifted.gky.cols() != l * P ||
        lifted.hhat.cols() != r * P) {
        throw std::invalid_argument("reduce_model: lifted model and basis dimensions differ");
    }
    const Eigen::MatrixXd pinv = basis.phi_pinv();
    const Eigen::MatrixXd phi_u = basis.phi_lead(input_lead);
    const Eigen::MatrixXd phi_y = basis.phi();
    const Eigen::MatrixXd mu = pinv * lifted.gku * phi_u;
    const Eigen::MatrixXd my = pinv * lifted.gky * phi_y;
    const Eigen::MatrixXd mh = pinv * lifted.hhat * phi_u;

    ReducedModel m;
    m.output_dim = l * basis.n_splines;
    m.input_dim = r * basis.n_splines;
    const int ny = m.output_dim, nu = m.input_dim, n = m.state_dim();
    m.a_bar = Eigen::MatrixXd::Zero(n, n);
    m.a_bar.topLeftCorner(ny, ny).setIdentity();
    m.a_bar.block(0, ny, ny, nu) = mu;
    m.a_bar.block(0, ny + nu, ny, ny) = my;
    m.a_bar.block(ny + nu, ny, ny, nu) = mu;
    m.a_bar.block(ny + nu, ny + nu, ny, ny) = my;
    m.b_hat = Eigen::MatrixXd::Zero(n, nu);
    m.b_hat.topRows(ny) = mh;
    m.b_hat.middleRows(ny, nu).setIdentity();
    m.b_hat.bottomRows(ny) = mh;
    return m;
}

PredictionMatrices build_prediction(const ReducedModel& model, int horizon_pred, int horizon_est) {
    if (horizon_est < 1 || horizon_est > horizon_pred) {
        throw std::invalid_argument("build_prediction: need 1 <= N_u <= N_p");
    }
    const int n = model.state_dim(), m = model.input_dim;
    const int np = horizon_pred, nu = horizon_est;

    std::vector<Eigen::MatrixXd> pow(static_cast<std::size_t>(np) + 1);
    pow[0] = Eigen::MatrixXd::Identity(n, n);
    for (int i = 1; i <= np; ++i) pow[static_cast<std::size_t>(i)] = model.a_bar * pow[static_cast<std::size_t>(i) - 1];

    // impulse[i] = Abar^i Bhat, held[i] = sum_{k<=i} Abar^k Bhat
    std::vector<Eigen::MatrixXd> impulse(static_cast<std::size_t>(np)), held(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i) {
        impulse[static_cast<std::size_t>(i)] = pow[static_cast<std::size_t>(i)] * model.b_hat;
        held[static_cast<std::size_t>(i)] = i == 0 ? impulse[0] : Eigen::MatrixXd(held[static_cast<std::size_t>(i) - 1] + impulse[static_cast<std::size_t>(i)]);
    }

    PredictionMatrices out;
    out.horizon_pred = np;
    out.horizon_est = nu;
    out.big_a.resize((np + 1) * n, n);
    for (int s = 0; s <= np; ++s) out.big_a.middleRows(s * n, n) = pow[static_cast<std::size_t>(s)];
    out.big_b = Eigen::MatrixXd::Zero((np + 1) * n, nu * m);
    for (int s = 1; s <= np; ++s) {
        for (int q = 1; q <= nu && q <= s; ++q) {
            const auto k = static_cast<std::size_t>(s - q);
            out.big_b.block(s * n, (q - 1) * m, n, m) = q < nu ? impulse[k] : held[k];
        }
    }
    return out;
}

QpProblem build_qp(const PredictionMatrices& pred, const ReducedModel& model, const QpWeights& w) {
    const int n = model.state_dim(), m = model.input_dim;
    const int ny = model.output_dim;
    if (pred.big_a.cols() != n || pred.big_b.cols() != pred.horizon_est * m) {
        throw std::invalid_argument("build_qp: prediction matrices do not match model");
    }
    Eigen::VectorXd q(n);
    q << Eigen::VectorXd::Constant(ny, w.q_output), Eigen::VectorXd::Constant(m, w.q_theta),
        Eigen::VectorXd::Constant(ny, w.q_doutput);

    QpProblem qp;
    qp.q_diag = q.replicate(pred.horizon_pred + 1, 1);
    qp.r_diag = Eigen::VectorXd::Constant(pred.horizon_est * m, w.r_input);
    const Eigen::MatrixXd qb = qp.q_diag.asDiagonal() * pred.big_b;
    qp.h = pred.big_b.transpose() * qb;
    qp.h.diagonal() += qp.r_diag;
    qp.h = 0.5 * (qp.h + qp.h.transpose());
    qp.f = pred.big_a.transpose() * qb;
    return qp;
}

Eigen::VectorXd solve_horizon(const QpProblem& qp, const Eigen::VectorXd& kbar) {
    if (kbar.size() != qp.f.rows()) throw std::invalid_argument("solve_horizon: state size mismatch");
    if (!qp.h.allFinite() || !qp.f.allFinite() || !kbar.allFinite()) {
        throw QpFailure("solve_horizon: non-finite problem data");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(qp.h);
    if (llt.info() != Eigen::Success) throw QpFailure("solve_horizon: H is not positive definite");
    Eigen::VectorXd u = llt.solve(-(qp.f.transpose() * kbar));
    if (!u.allFinite()) throw QpFailure("solve_horizon: non-finite solution");
    return u;
}

EstimatorState EstimatorState::zero(const SplineBasis& basis) {
    EstimatorState s;
    s.theta = Eigen::VectorXd::Zero(basis.coeff_size());
    s.theta_prev = s.theta;
    s.ybar_prev = Eigen::VectorXd::Zero(basis.coeff_size());
    return s;
}

Eigen::VectorXd assemble_state(const EstimatorState& state, const Eigen::VectorXd& ybar) {
    const Eigen::Index ny = ybar.size(), nu = state.theta.size();
    Eigen::VectorXd k(2 * ny + nu);
    if (state.has_history) {
        k << ybar, state.theta - state.theta_prev, ybar - state.ybar_prev;
    } else {
        k << ybar, Eigen::VectorXd::Zero(nu), Eigen::VectorXd::Zero(ny);
    }
    return k;
}

AdvanceResult advance(const EstimatorState& state, const LiftedModel& lifted,
                      const SplineBasis& basis, const QpWeights& weights, const HorizonSpec& horizon,
                      const Eigen::VectorXd& lifted_output, bool active) {
    const Eigen::VectorXd ybar = project(lifted_output, basis);
    AdvanceResult res;
    res.kbar = assemble_state(state, ybar);
    res.delta_theta = Eigen::VectorXd::Zero(state.theta.size());
    if (active) {
        try {
            const ReducedModel model = reduce_model(lifted, basis, horizon.input_lead);
            const PredictionMatrices pred =
                build_prediction(model, horizon.horizon_pred, horizon.horizon_est);
            const QpProblem qp = build_qp(pred, model, weights);
            const Eigen::VectorXd u = solve_horizon(qp, res.kbar);
            res.delta_theta = u.head(model.input_dim);
            res.status = SolveStatus::ok;
        } catch (const QpFailure&) {
            res.status = SolveStatus::frozen;
        }
    }
    res.state.theta_prev = state.theta;
    res.state.theta = state.theta + res.delta_theta;
    res.state.ybar_prev = ybar;
    res.state.revolution = state.revolution + 1;
    res.state.has_history = true;
    return res;
}

Eigen::VectorXd estimate_bews(const Eigen::VectorXd& theta, const SplineBasis& basis, int station,
                              double prior) {
    Eigen::VectorXd u = synthesize(theta, basis, station).array() + prior;
    return u.cwiseMax(1.0);
}

}  // namespace spre
