#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "spre/bspline.hpp"
#include "spre/cone_model.hpp"
#include "spre/core.hpp"
#include "spre/rhe.hpp"
#include "spre/sysid.hpp"
#include "spre/turbine_sim.hpp"

namespace spre {

// One azimuth-station sample handed to the estimator.
struct StationSample {
    int station = 0;
    Measurement measurement;
};

struct StationOutput {
    std::array<double, kBlades> bews{};        // published estimate used at this station
    std::array<double, kBlades> moop_pred{};   // predicted moment from the published estimate
    std::array<double, kBlades> loop_error{};  // m - m_pred(estimate + dither), [N m]
    bool synced = false;                       // false until the first station 0
    bool revolution_closed = false;
};

struct RevolutionLog {
    long revolution = 0;
    double ybar_norm = 0.0;
    double delta_theta_norm = 0.0;
    SolveStatus status = SolveStatus::passive;
    double rews_estimate = 0.0;
    double prior = 0.0;
    double time = 0.0;
};

// Closed-loop blade-effective wind speed estimator. Stations arrive in
// azimuth order; the speed emitted at station s is the prediction for s+1.
class Estimator {
public:
    Estimator(const SimConfig& cfg, std::shared_ptr<const ConeTable> table, TurbineGeometry geom,
              AirProperties air, double station_dt);

    StationOutput process(const StationSample& sample);

    const MarkovEstimate& markov() const { return markov_; }
    const EstimatorState& state() const { return state_; }
    const SplineBasis& basis() const { return basis_; }
    const std::vector<RevolutionLog>& revolutions() const { return logs_; }
    double prior() const { return prior_; }
    long frozen_events() const { return frozen_; }

private:
    void close_revolution(double time);
    void emit_next(int next_station);

    SimConfig cfg_;
    std::shared_ptr<const ConeTable> table_;
    TurbineGeometry geom_;
    AirProperties air_;
    SplineBasis basis_;
    PeriodicBuffer buffer_;
    MarkovEstimate markov_;
    EstimatorState state_;
    std::vector<PrbsGenerator> prbs_;

    double prior_;
    bool prior_seen_ = false;
    bool synced_ = false;
    Eigen::VectorXd u_pub_;    // estimate for the upcoming station
    Eigen::VectorXd u_loop_;   // with dither, fed to the model and to sysid
    Eigen::VectorXd y_rev_;    // lifted dither-free error of the current revolution
    double inv_sum_ = 0.0;
    long inv_count_ = 0;
    double rev_start_time_ = 0.0;
    double pub_sum_ = 0.0;
    long pub_count_ = 0;
    long frozen_ = 0;
    std::vector<RevolutionLog> logs_;
};

}  // namespace spre
