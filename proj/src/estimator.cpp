#include "spre/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "spre/lifting.hpp"

namespace spre {

namespace {

constexpr std::uint64_t kPrbsStream = 100;

}  // namespace

Estimator::Estimator(const SimConfig& cfg, std::shared_ptr<const ConeTable> table,
                     TurbineGeometry geom, AirProperties air, double station_dt)
    : cfg_(validate_config(cfg)),
      table_(std::move(table)),
      geom_(geom),
      air_(air),
      basis_(build_basis(cfg.n_splines, cfg.spline_degree, cfg.estimator_samples_per_rev, kBlades)),
      buffer_(cfg.estimator_samples_per_rev, cfg.past_window, kBlades, kBlades),
      markov_(init_markov(cfg.past_window, kBlades, kBlades, cfg.rls_ridge, cfg.forgetting)),
      state_(EstimatorState::zero(basis_)),
      prior_(cfg.initial_speed),
      u_pub_(Eigen::VectorXd::Constant(kBlades, cfg.initial_speed)),
      u_loop_(u_pub_),
      y_rev_(Eigen::VectorXd::Zero(kBlades * cfg.estimator_samples_per_rev)) {
    if (!table_) throw std::invalid_argument("Estimator: cone table required");
    if (!(station_dt > 0.0)) throw std::invalid_argument("Estimator: station_dt must be > 0");
    for (int i = 0; i < kBlades; ++i) {
        prbs_.emplace_back(derive_seed(cfg.rng_seed, kPrbsStream + static_cast<std::uint64_t>(i)),
                           cfg.prbs_amplitude, cfg.prbs_cutoff, station_dt);
    }
}

void Estimator::emit_next(int next_station) {
    u_pub_ = estimate_bews(state_.theta, basis_, next_station, prior_);
    u_loop_ = u_pub_;
    for (int i = 0; i < kBlades; ++i) {
        u_loop_(i) = std::max(1.0, u_pub_(i) + prbs_[static_cast<std::size_t>(i)].next());
    }
}

StationOutput Estimator::process(const StationSample& sample) {
    const int P = cfg_.estimator_samples_per_rev;
    const Measurement& m = sample.measurement;
    if (sample.station < 0 || sample.station >= P) throw std::out_of_range("Estimator: station out of range");

    StationOutput out;
    if (!synced_) {
        if (sample.station != 0) {
            for (int i = 0; i < kBlades; ++i) {
                out.bews[i] = prior_;
                out.moop_pred[i] =
                    predict_moop(prior_, m.rotor_speed, m.pitch[i], m.azimuth[i], i, *table_, geom_, air_);
                out.loop_error[i] = m.moop[i] - out.moop_pred[i];
            }
            return out;
        }
        synced_ = true;
        rev_start_time_ = m.time;
        emit_next(0);
    }
    out.synced = true;

    Eigen::VectorXd y(kBlades), y_pub(kBlades);
    for (int i = 0; i < kBlades; ++i) {
        const double loop_pred =
            predict_moop(u_loop_(i), m.rotor_speed, m.pitch[i], m.azimuth[i], i, *table_, geom_, air_);
        out.bews[i] = u_pub_(i);
        out.moop_pred[i] =
            predict_moop(u_pub_(i), m.rotor_speed, m.pitch[i], m.azimuth[i], i, *table_, geom_, air_);
        out.loop_error[i] = m.moop[i] - loop_pred;
        y(i) = out.loop_error[i] / cfg_.moop_scale;
        y_pub(i) = (m.moop[i] - out.moop_pred[i]) / cfg_.moop_scale;

        try {
            InvertOptions opt;
            opt.monotone_samples = 0;
            inv_sum_ += static_invert_moop(m.moop[i], m.rotor_speed, m.pitch[i], m.azimuth[i], i,
                                           *table_, geom_, air_, opt);
            ++inv_count_;
        } catch (const NonInvertible&) {
            // sample outside the invertible envelope; the prior skips it
        }
    }
    y_rev_.segment(sample.station * kBlades, kBlades) = y_pub;
    pub_sum_ += u_pub_.mean();
    ++pub_count_;

    emit_next((sample.station + 1) % P);
    if (auto delta = buffer_.push(u_loop_, y)) {
        if (buffer_.regressor_ready()) rls_update(markov_, buffer_.regressor(), delta->dy);
    }

    if (sample.station == P - 1) {
        close_revolution(m.time);
        out.revolution_closed = true;
    }
    return out;
}

void Estimator::close_revolution(double time) {
    RevolutionLog log;
    log.revolution = state_.revolution;
    log.time = time;
    log.rews_estimate = pub_count_ ? pub_sum_ / static_cast<double>(pub_count_) : prior_;

    if (inv_count_ > 0) {
        const double target = inv_sum_ / static_cast<double>(inv_count_);
        const double a = 1.0 - std::exp(-(time - rev_start_time_) / cfg_.prior_time_constant);
        prior_ += a * (target - prior_);
    }

    const bool active = state_.revolution + 1 >= cfg_.warmup_revs && markov_.samples > 0;
    LiftedModel lifted;
    if (active) {
        lifted = lift(markov_.xi, cfg_.past_window, kBlades, kBlades, cfg_.estimator_samples_per_rev,
                      Exec::parallel);
    }
    const QpWeights w{cfg_.q_output, cfg_.q_theta, cfg_.q_doutput, cfg_.r_input};
    const HorizonSpec h{cfg_.horizon_pred, cfg_.horizon_est, 1};
    AdvanceResult res = advance(state_, lifted, basis_, w, h, y_rev_, active);
    if (res.status == SolveStatus::frozen) ++frozen_;

    log.ybar_norm = res.kbar.head(basis_.coeff_size()).norm();
    log.delta_theta_norm = res.delta_theta.norm();
    log.status = res.status;
    log.prior = prior_;
    logs_.push_back(log);

    state_ = std::move(res.state);
    inv_sum_ = 0.0;
    inv_count_ = 0;
    pub_sum_ = 0.0;
    pub_count_ = 0;
    rev_start_time_ = time;
}

}  // namespace spre
