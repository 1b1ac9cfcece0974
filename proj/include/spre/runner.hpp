#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spre/cone_model.hpp"
#include "spre/core.hpp"
#include "spre/estimator.hpp"
#include "spre/turbine_sim.hpp"
#include "spre/windfield.hpp"

namespace spre {

struct WindSpec {
    double shear_exponent = 0.0;
    std::vector<StepSchedule::Step> steps{{0.0, 8.0}};
    bool has_wake = false;
    WakeField wake;
    double offset_start_d = 1.5;  // [rotor diameters]
    double offset_end_d = 0.0;
};

struct PlantSpec {
    double noise_fraction = 0.01;     // sigma_m as a fraction of rated moment
    double mismatch_c_a = 0.03;       // truth c_a = (1 + x) * table c_a
    double mismatch_eps_gravity = 0.0;
    double mismatch_eps_tower = 0.0;
};

struct Scenario {
    std::string name;
    WindSpec wind;
    PlantSpec plant;
    SimConfig sim;
    TurbineParams turbine;
    ConeSurface surface;  // the table's surface; the plant perturbs it per PlantSpec
    ConeGrid grid = ConeGrid::defaults();

    WindField wind_field() const;
    ConeSurface truth_surface() const;
    void validate() const;
};

std::vector<std::string> scenario_names();
// Throws std::out_of_range for unknown names.
Scenario named_scenario(const std::string& name);

struct Row {
    double t = 0.0;
    long rev = -1;
    int station = 0;
    double psi1_deg = 0.0;
    std::array<double, kBlades> u_est{};
    std::array<double, kBlades> u_ref{};
    double rews_est = 0.0;
    double rews_ref = 0.0;
    std::array<double, kBlades> moop{};
    std::array<double, kBlades> moop_pred{};
    std::array<double, kBlades> moop_err{};
    std::array<double, kBlades> moop_true{};  // noise-free plant moment
    double rotor_speed = 0.0;
    double pitch_deg = 0.0;
    double u_hub = 0.0;        // undisturbed hub speed of the schedule
    double wake_offset = 0.0;
};

using TimeSeries = std::vector<Row>;

inline constexpr const char* kTimeSeriesSchema = "# spre-timeseries v1";

void write_timeseries(const TimeSeries& ts, const std::filesystem::path& path);
TimeSeries read_timeseries(const std::filesystem::path& path);

struct AzimuthMap {
    double bin_deg = 10.0;
    std::vector<double> mean;  // NaN for empty bins
    std::vector<long> count;

    double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_deg; }
    std::size_t argmax() const;
    std::size_t argmin() const;
};

// Bins every blade's (azimuth, speed) pair over rows with t in [t0, t1).
AzimuthMap azimuth_map(const TimeSeries& ts, double t0, double t1, bool reference,
                       double bin_deg = 10.0);

struct SegmentMetrics {
    double t_start = 0.0, t_end = 0.0;
    double hub_speed = 0.0;               // mean reference REWS in the segment
    long revolutions = 0;
    double moop_rms_first5 = 0.0;         // [N m]
    double moop_rms_last5 = 0.0;          // [N m]
    double moop_true_rms_first5 = 0.0;    // against the noise-free plant moment
    double moop_true_rms_last5 = 0.0;
    double rews_rel_error_max = 0.0;      // revolution means, after the settling revolutions
    double azimuth_max_deg = 0.0;         // of the estimated map after settling
};

struct Metrics {
    std::array<double, kBlades> bews_rmse{};
    double rews_bias = 0.0;
    double rews_rmse = 0.0;
    std::vector<SegmentMetrics> segments;
    AzimuthMap azimuth_map_est;
    AzimuthMap azimuth_map_ref;
    double azimuth_max_deg = 0.0;
    double wake_sector_azimuth = 0.0;
};

struct MetricsOptions {
    long warmup_revs = 20;          // excluded from the global statistics
    long settle_revs = 10;          // excluded after each step for segment REWS
    long min_revs = 50;
    double step_threshold = 0.25;   // [m/s] jump in reference REWS that opens a segment
    double bin_deg = 10.0;
};

class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Metrics compute_metrics(const TimeSeries& ts, const MetricsOptions& opt = {});
void write_metrics(const Metrics& m, const std::filesystem::path& path);

struct RunOptions {
    std::shared_ptr<const ConeTable> table;  // built from the scenario when null
    bool dump_xi = false;
    bool dump_field = false;
    bool compute_metrics = true;
};

struct RunResult {
    TimeSeries series;
    std::optional<Metrics> metrics;
    std::vector<RevolutionLog> revolutions;
    std::vector<Eigen::MatrixXd> xi_history;  // one per closed revolution when dump_xi
    long frozen_events = 0;
};

RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

// Writes timeseries.csv, metrics.csv (when present), revolutions.csv and the
// optional dumps into `dir`.
void write_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir,
                   const RunOptions& opt);

void write_field_slice(const WindField& field, const TurbineGeometry& geom,
                       const std::vector<double>& times, const std::filesystem::path& path,
                       int n = 41);

// Key-value scenario file: [scenario] base=<name>, then [sim], [turbine],
// [surface], [mismatch], [wind] sections overriding the base.
Scenario load_scenario_file(const std::filesystem::path& path);
Scenario apply_overrides(Scenario base, const std::filesystem::path& path);

}  // namespace spre
