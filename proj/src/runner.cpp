#include "spre/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "spre/kernels.hpp"

namespace spre {

namespace {

constexpr std::uint64_t kNoiseStream = 1;

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const std::vector<std::string>& timeseries_columns() {
    static const std::vector<std::string> cols = {
        "t",        "rev",      "station",  "psi1_deg", "u_est1",   "u_est2",      "u_est3",
        "u_ref1",   "u_ref2",   "u_ref3",   "rews_est", "rews_ref", "m1",          "m2",
        "m3",       "m_pred1",  "m_pred2",  "m_pred3",  "e1",       "e2",          "e3",
        "m_true1",  "m_true2",  "m_true3",  "omega",    "pitch_deg", "u_hub",   "wake_offset"};
    return cols;
}

}  // namespace

// ---------------------------------------------------------------- scenarios

WindField Scenario::wind_field() const {
    ShearedField shear;
    shear.hub_speed = StepSchedule::make(wind.steps);
    shear.shear_exponent = wind.shear_exponent;
    shear.hub_height = turbine.geom.hub_height;
    if (!wind.has_wake) return WindField::sheared(shear);
    WakeField w = wind.wake;
    w.rotor_diameter = 2.0 * turbine.geom.rotor_radius;
    w.hub_height = turbine.geom.hub_height;
    return WindField::composite(shear, w, wind.offset_start_d * w.rotor_diameter,
                                wind.offset_end_d * w.rotor_diameter, sim.duration);
}

ConeSurface Scenario::truth_surface() const {
    ConeSurface t = surface;
    t.c_a *= 1.0 + plant.mismatch_c_a;
    t.eps_gravity *= 1.0 + plant.mismatch_eps_gravity;
    t.eps_tower *= 1.0 + plant.mismatch_eps_tower;
    return t;
}

void Scenario::validate() const {
    std::vector<std::string> v;
    auto collect = [&](const std::function<void()>& f) {
        try {
            f();
        } catch (const ConfigError& e) {
            v.insert(v.end(), e.violations().begin(), e.violations().end());
        } catch (const std::invalid_argument& e) {
            v.emplace_back(e.what());
        }
    };
    collect([&] { validate_config(sim); });
    collect([&] { turbine.validate(); });
    collect([&] { surface.validate(); });
    collect([&] { grid.validate(); });
    collect([&] { StepSchedule::make(wind.steps); });
    if (wind.has_wake) collect([&] { wind.wake.validate(); });
    if (!(wind.shear_exponent >= 0.0 && wind.shear_exponent < 1.0)) {
        v.emplace_back("shear_exponent must lie in [0, 1)");
    }
    if (!(plant.noise_fraction >= 0.0)) v.emplace_back("noise_fraction must be >= 0");
    if (!(plant.mismatch_c_a > -1.0)) v.emplace_back("mismatch c_a must be > -1");
    if (!(plant.mismatch_eps_gravity > -1.0 && plant.mismatch_eps_tower > -1.0)) {
        v.emplace_back("mismatch eps must be > -1");
    }
    if (!v.empty()) throw ConfigError(std::move(v));
}

std::vector<std::string> scenario_names() { return {"step-shear", "wake-overlap", "uniform-ideal"}; }

Scenario named_scenario(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "step-shear") {
        s.wind.shear_exponent = 0.2;
        s.wind.steps.clear();
        for (int k = 0; k < 8; ++k) s.wind.steps.push_back({100.0 * k, 8.0 + k});
    } else if (name == "wake-overlap") {
        s.wind.steps = {{0.0, 12.0}};
        s.wind.has_wake = true;
        s.wind.wake.ambient_speed = 12.0;
        s.wind.wake.turbulence_intensity = 0.06;
        s.wind.wake.downstream_spacing = 3.0;
        s.wind.offset_start_d = 1.5;
        s.wind.offset_end_d = 0.0;
    } else if (name == "uniform-ideal") {
        s.wind.steps = {{0.0, 8.0}};
        s.plant.noise_fraction = 0.0;
        s.plant.mismatch_c_a = 0.0;
        s.sim.duration = 400.0;
    } else {
        throw std::out_of_range("unknown scenario '" + name + "'");
    }
    return s;
}

// ------------------------------------------------------------------- run

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
    s.validate();
    const TurbineGeometry& geom = s.turbine.geom;
    const AirProperties& air = s.turbine.air;
    auto table = opt.table ? opt.table
                           : std::make_shared<const ConeTable>(build_table(s.surface, geom, air, s.grid));
    const WindField field = s.wind_field();
    const ConeSurface truth = s.truth_surface();

    TurbineParams tp = s.turbine;
    tp.noise_sigma = s.plant.noise_fraction * tp.rated_moop(truth);
    TurbineSim sim(tp, truth, derive_seed(s.sim.rng_seed, kNoiseStream));

    const int P = s.sim.estimator_samples_per_rev;
    const double spacing = kTwoPi / P;
    const double station_dt = spacing / tp.rotor_speed_rated;
    Estimator est(s.sim, table, geom, air, station_dt);

    RunResult out;
    const long steps = std::lround(s.sim.duration / s.sim.dt_sim);
    out.series.reserve(static_cast<std::size_t>(s.sim.duration * tp.rotor_speed_rated / spacing) + 16);

    TurbineState state = sim.initial_state(field);
    std::optional<StepResult> prev;
    long next_index = static_cast<long>(std::floor(state.azimuth_total / spacing)) + 1;

    for (long k = 0; k < steps; ++k) {
        StepResult cur = sim.step(state, field, s.sim.dt_sim);
        while (static_cast<double>(next_index) * spacing <= cur.state.azimuth_total) {
            const double target = static_cast<double>(next_index) * spacing;
            const bool use_prev =
                prev && std::abs(prev->state.azimuth_total - target) < std::abs(cur.state.azimuth_total - target);
            const StepResult& pick = use_prev ? *prev : cur;

            const long rev = est.state().revolution;
            StationSample sample{static_cast<int>(next_index % P), pick.measurement};
            const StationOutput o = est.process(sample);

            Row row;
            row.t = pick.measurement.time;
            row.rev = o.synced ? rev : -1;
            row.station = sample.station;
            row.psi1_deg = rad2deg(pick.state.azimuth);
            double se = 0.0;
            for (int i = 0; i < kBlades; ++i) {
                const auto b = static_cast<std::size_t>(i);
                row.u_est[b] = o.bews[b];
                row.u_ref[b] = pick.reference.speed[b];
                row.moop[b] = pick.measurement.moop[b];
                row.moop_pred[b] = o.moop_pred[b];
                row.moop_err[b] = row.moop[b] - row.moop_pred[b];
                row.moop_true[b] = pick.moop_clean[b];
                se += o.bews[b];
            }
            row.rews_est = se / kBlades;
            row.rews_ref = pick.reference.rews;
            row.rotor_speed = pick.state.rotor_speed;
            row.pitch_deg = rad2deg(pick.state.pitch[0]);
            row.u_hub = field.shear().hub_speed.at(row.t);
            row.wake_offset = field.wake_field() ? field.wake_offset(row.t) : 0.0;
            out.series.push_back(row);

            if (opt.dump_xi && o.revolution_closed) out.xi_history.push_back(est.markov().xi);
            ++next_index;
        }
        state = cur.state;
        prev = std::move(cur);
    }

    out.revolutions = est.revolutions();
    out.frozen_events = est.frozen_events();
    if (opt.compute_metrics) {
        try {
            out.metrics = compute_metrics(out.series);
        } catch (const InsufficientData&) {
            out.metrics.reset();
        }
    }
    return out;
}

// ------------------------------------------------------------- CSV output

void write_timeseries(const TimeSeries& ts, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << kTimeSeriesSchema << '\n';
    const auto& cols = timeseries_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
    f << '\n';
    for (const Row& r : ts) {
        f << fmt9(r.t) << ',' << r.rev << ',' << r.station << ',' << fmt9(r.psi1_deg);
        for (double v : r.u_est) f << ',' << fmt9(v);
        for (double v : r.u_ref) f << ',' << fmt9(v);
        f << ',' << fmt9(r.rews_est) << ',' << fmt9(r.rews_ref);
        for (double v : r.moop) f << ',' << fmt9(v);
        for (double v : r.moop_pred) f << ',' << fmt9(v);
        for (double v : r.moop_err) f << ',' << fmt9(v);
        for (double v : r.moop_true) f << ',' << fmt9(v);
        f << ',' << fmt9(r.rotor_speed) << ',' << fmt9(r.pitch_deg) << ',' << fmt9(r.u_hub) << ','
          << fmt9(r.wake_offset) << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

TimeSeries read_timeseries(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({"cannot open time series " + path.string()});
    std::string line;
    if (!std::getline(f, line) || line != kTimeSeriesSchema) {
        throw ConfigError({path.string() + ": missing schema line '" + kTimeSeriesSchema + "'"});
    }
    const auto& cols = timeseries_columns();
    std::string expected;
    for (std::size_t i = 0; i < cols.size(); ++i) expected += (i ? "," : "") + cols[i];
    if (!std::getline(f, line) || line != expected) {
        throw ConfigError({path.string() + ": unexpected header row"});
    }

    TimeSeries ts;
    std::vector<double> v(cols.size());
    long lineno = 2;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream in(line);
        std::string cell;
        std::size_t n = 0;
        while (std::getline(in, cell, ',')) {
            if (n >= v.size()) break;
            try {
                v[n++] = std::stod(cell);
            } catch (const std::exception&) {
                throw ConfigError({path.string() + ":" + std::to_string(lineno) + ": bad number"});
            }
        }
        if (n != v.size()) {
            throw ConfigError({path.string() + ":" + std::to_string(lineno) + ": wrong column count"});
        }
        Row r;
        std::size_t c = 0;
        r.t = v[c++];
        r.rev = std::lround(v[c++]);
        r.station = static_cast<int>(std::lround(v[c++]));
        r.psi1_deg = v[c++];
        for (double& x : r.u_est) x = v[c++];
        for (double& x : r.u_ref) x = v[c++];
        r.rews_est = v[c++];
        r.rews_ref = v[c++];
        for (double& x : r.moop) x = v[c++];
        for (double& x : r.moop_pred) x = v[c++];
        for (double& x : r.moop_err) x = v[c++];
        for (double& x : r.moop_true) x = v[c++];
        r.rotor_speed = v[c++];
        r.pitch_deg = v[c++];
        r.u_hub = v[c++];
        r.wake_offset = v[c++];
        ts.push_back(r);
    }
    return ts;
}

// ----------------------------------------------------------------- metrics

std::size_t AzimuthMap::argmax() const {
    std::size_t best = 0;
    double bv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mean.size(); ++i) {
        if (count[i] > 0 && mean[i] > bv) {
            bv = mean[i];
            best = i;
        }
    }
    return best;
}

std::size_t AzimuthMap::argmin() const {
    std::size_t best = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mean.size(); ++i) {
        if (count[i] > 0 && mean[i] < bv) {
            bv = mean[i];
            best = i;
        }
    }
    return best;
}

namespace {

template <class Pred>
AzimuthMap bin_rows(const TimeSeries& ts, bool reference, double bin_deg, Pred keep) {
    if (!(bin_deg > 0.0) || std::fmod(360.0, bin_deg) != 0.0) {
        throw std::invalid_argument("azimuth_map: bin width must divide 360");
    }
    const auto n = static_cast<std::size_t>(std::lround(360.0 / bin_deg));
    AzimuthMap m;
    m.bin_deg = bin_deg;
    m.mean.assign(n, 0.0);
    m.count.assign(n, 0);
    for (const Row& r : ts) {
        if (r.rev < 0 || !keep(r)) continue;
        for (int i = 0; i < kBlades; ++i) {
            double a = std::fmod(r.psi1_deg + 360.0 * i / kBlades, 360.0);
            if (a < 0.0) a += 360.0;
            const auto b = std::min(n - 1, static_cast<std::size_t>(a / bin_deg));
            m.mean[b] += reference ? r.u_ref[static_cast<std::size_t>(i)] : r.u_est[static_cast<std::size_t>(i)];
            ++m.count[b];
        }
    }
    for (std::size_t b = 0; b < n; ++b) {
        m.mean[b] = m.count[b] ? m.mean[b] / static_cast<double>(m.count[b])
                               : std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

struct RevSpan {
    std::size_t first, last;  // row indices
};

}  // namespace

AzimuthMap azimuth_map(const TimeSeries& ts, double t0, double t1, bool reference, double bin_deg) {
    return bin_rows(ts, reference, bin_deg, [&](const Row& r) { return r.t >= t0 && r.t < t1; });
}

Metrics compute_metrics(const TimeSeries& ts, const MetricsOptions& opt) {
    std::map<long, RevSpan> revs;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const long r = ts[k].rev;
        if (r < 0) continue;
        auto [it, fresh] = revs.try_emplace(r, RevSpan{k, k});
        if (!fresh) it->second.last = k;
    }
    if (static_cast<long>(revs.size()) < opt.min_revs) {
        throw InsufficientData("compute_metrics: need at least " + std::to_string(opt.min_revs) +
                               " revolutions, got " + std::to_string(revs.size()));
    }

    Metrics m;
    auto in_window = [&](const Row& r) { return r.rev >= opt.warmup_revs; };
    std::array<double, kBlades> se{};
    double bias = 0.0, se_rews = 0.0;
    long n = 0;
    for (const Row& r : ts) {
        if (r.rev < 0 || !in_window(r)) continue;
        for (std::size_t i = 0; i < kBlades; ++i) se[i] += std::pow(r.u_est[i] - r.u_ref[i], 2);
        bias += r.rews_est - r.rews_ref;
        se_rews += std::pow(r.rews_est - r.rews_ref, 2);
        ++n;
    }
    if (n == 0) throw InsufficientData("compute_metrics: no samples after warm-up");
    for (std::size_t i = 0; i < kBlades; ++i) m.bews_rmse[i] = std::sqrt(se[i] / static_cast<double>(n));
    m.rews_bias = bias / static_cast<double>(n);
    m.rews_rmse = std::sqrt(se_rews / static_cast<double>(n));

    m.azimuth_map_est = bin_rows(ts, false, opt.bin_deg, in_window);
    m.azimuth_map_ref = bin_rows(ts, true, opt.bin_deg, in_window);
    m.azimuth_max_deg = m.azimuth_map_est.bin_center(m.azimuth_map_est.argmax());
    m.wake_sector_azimuth = m.azimuth_map_est.bin_center(m.azimuth_map_est.argmin());

    // steady segments: runs of constant hub speed
    std::size_t start = 0;
    for (std::size_t k = 1; k <= ts.size(); ++k) {
        if (k < ts.size() && std::abs(ts[k].u_hub - ts[start].u_hub) <= opt.step_threshold) continue;
        SegmentMetrics seg;
        seg.t_start = ts[start].t;
        seg.t_end = ts[k - 1].t;
        std::vector<long> inside;
        for (const auto& [r, span] : revs) {
            if (span.first >= start && span.last < k) inside.push_back(r);
        }
        seg.revolutions = static_cast<long>(inside.size());
        double sum_ref = 0.0;
        for (std::size_t j = start; j < k; ++j) sum_ref += ts[j].rews_ref;
        seg.hub_speed = sum_ref / static_cast<double>(k - start);

        auto moop_rms = [&](std::size_t a, std::size_t b, bool clean) {
            double s2 = 0.0;
            long cnt = 0;
            for (std::size_t q = a; q < b; ++q) {
                const RevSpan& span = revs.at(inside[q]);
                for (std::size_t j = span.first; j <= span.last; ++j) {
                    for (std::size_t i = 0; i < kBlades; ++i) {
                        const double e = clean ? ts[j].moop_true[i] - ts[j].moop_pred[i] : ts[j].moop_err[i];
                        s2 += e * e;
                    }
                    cnt += kBlades;
                }
            }
            return cnt ? std::sqrt(s2 / static_cast<double>(cnt)) : std::numeric_limits<double>::quiet_NaN();
        };
        const std::size_t nr = inside.size();
        const std::size_t head = std::min<std::size_t>(5, nr), tail = nr > 5 ? nr - 5 : 0;
        seg.moop_rms_first5 = moop_rms(0, head, false);
        seg.moop_rms_last5 = moop_rms(tail, nr, false);
        seg.moop_true_rms_first5 = moop_rms(0, head, true);
        seg.moop_true_rms_last5 = moop_rms(tail, nr, true);

        seg.rews_rel_error_max = std::numeric_limits<double>::quiet_NaN();
        double t_settled = std::numeric_limits<double>::infinity();
        for (std::size_t q = static_cast<std::size_t>(opt.settle_revs); q < nr; ++q) {
            const RevSpan& span = revs.at(inside[q]);
            t_settled = std::min(t_settled, ts[span.first].t);
            double est = 0.0, ref = 0.0;
            for (std::size_t j = span.first; j <= span.last; ++j) {
                est += ts[j].rews_est;
                ref += ts[j].rews_ref;
            }
            const double rel = std::abs(est - ref) / ref;
            if (!(seg.rews_rel_error_max >= rel)) seg.rews_rel_error_max = rel;
        }
        if (std::isfinite(t_settled)) {
            const AzimuthMap am = azimuth_map(ts, t_settled, seg.t_end + 1e-9, false, opt.bin_deg);
            seg.azimuth_max_deg = am.bin_center(am.argmax());
        } else {
            seg.azimuth_max_deg = std::numeric_limits<double>::quiet_NaN();
        }
        m.segments.push_back(seg);
        start = k;
    }
    return m;
}

void write_metrics(const Metrics& m, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "# spre-metrics v1\nname,index,value\n";
    auto put = [&](const char* name, double idx, double v) { f << name << ',' << fmt9(idx) << ',' << fmt9(v) << '\n'; };
    for (std::size_t i = 0; i < kBlades; ++i) put("bews_rmse", static_cast<double>(i + 1), m.bews_rmse[i]);
    put("rews_bias", 0, m.rews_bias);
    put("rews_rmse", 0, m.rews_rmse);
    put("azimuth_max_deg", 0, m.azimuth_max_deg);
    put("wake_sector_azimuth", 0, m.wake_sector_azimuth);
    for (std::size_t k = 0; k < m.segments.size(); ++k) {
        const SegmentMetrics& s = m.segments[k];
        const auto i = static_cast<double>(k);
        put("segment_t_start", i, s.t_start);
        put("segment_t_end", i, s.t_end);
        put("segment_rews_ref_mean", i, s.hub_speed);
        put("segment_revolutions", i, static_cast<double>(s.revolutions));
        put("segment_moop_rms_first5", i, s.moop_rms_first5);
        put("segment_moop_rms_last5", i, s.moop_rms_last5);
        put("segment_moop_true_rms_first5", i, s.moop_true_rms_first5);
        put("segment_moop_true_rms_last5", i, s.moop_true_rms_last5);
        put("segment_rews_rel_error_max", i, s.rews_rel_error_max);
        put("segment_azimuth_max_deg", i, s.azimuth_max_deg);
    }
    for (std::size_t b = 0; b < m.azimuth_map_est.mean.size(); ++b) {
        put("azimuth_map_est", m.azimuth_map_est.bin_center(b), m.azimuth_map_est.mean[b]);
    }
    for (std::size_t b = 0; b < m.azimuth_map_ref.mean.size(); ++b) {
        put("azimuth_map_ref", m.azimuth_map_ref.bin_center(b), m.azimuth_map_ref.mean[b]);
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_field_slice(const WindField& field, const TurbineGeometry& geom,
                       const std::vector<double>& times, const std::filesystem::path& path, int n) {
    std::vector<double> ys(static_cast<std::size_t>(n)), zs(static_cast<std::size_t>(n));
    const double R = geom.rotor_radius;
    for (int i = 0; i < n; ++i) {
        const double f = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
        ys[static_cast<std::size_t>(i)] = -R + 2.0 * R * f;
        zs[static_cast<std::size_t>(i)] = geom.hub_height - R + 2.0 * R * f;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# spre-field v1\nt,y,z,u\n";
    std::vector<double> u(ys.size() * zs.size());
    for (double t : times) {
        kernels::omp::sample_plane(field, ys, zs, t, u);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            for (std::size_t j = 0; j < ys.size(); ++j) {
                out << fmt9(t) << ',' << fmt9(ys[j]) << ',' << fmt9(zs[i]) << ','
                    << fmt9(u[i * ys.size() + j]) << '\n';
            }
        }
    }
}

void write_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir,
                   const RunOptions& opt) {
    std::filesystem::create_directories(dir);
    write_timeseries(r.series, dir / "timeseries.csv");
    if (r.metrics) write_metrics(*r.metrics, dir / "metrics.csv");

    {
        std::ofstream f(dir / "revolutions.csv");
        if (!f) throw std::runtime_error("cannot write revolutions.csv");
        f << "# spre-revolutions v1\nrev,t,status,ybar_norm,dtheta_norm,rews_est,prior\n";
        for (const RevolutionLog& l : r.revolutions) {
            const char* st = l.status == SolveStatus::ok ? "ok" : l.status == SolveStatus::frozen ? "frozen" : "passive";
            f << l.revolution << ',' << fmt9(l.time) << ',' << st << ',' << fmt9(l.ybar_norm) << ','
              << fmt9(l.delta_theta_norm) << ',' << fmt9(l.rews_estimate) << ',' << fmt9(l.prior) << '\n';
        }
    }
    if (opt.dump_xi) {
        std::ofstream f(dir / "xi.csv");
        if (!f) throw std::runtime_error("cannot write xi.csv");
        f << "# spre-xi v1\nrev,row,col,value\n";
        for (std::size_t k = 0; k < r.xi_history.size(); ++k) {
            const Eigen::MatrixXd& x = r.xi_history[k];
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                for (Eigen::Index j = 0; j < x.cols(); ++j) {
                    f << k << ',' << i << ',' << j << ',' << fmt9(x(i, j)) << '\n';
                }
            }
        }
    }
    if (opt.dump_field) {
        write_field_slice(s.wind_field(), s.turbine.geom,
                          {0.0, 0.5 * s.sim.duration, s.sim.duration}, dir / "field.csv");
    }
}

// ------------------------------------------------------------ config files

namespace {

using Setter = std::function<void(Scenario&, const std::string&)>;

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || v.find_first_not_of(" \t", used) != std::string::npos) {
        throw ConfigError({key + ": not a number: '" + v + "'"});
    }
    return x;
}

long to_long(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x)) throw ConfigError({key + ": not an integer: '" + v + "'"});
    return static_cast<long>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError({key + ": not a boolean: '" + v + "'"});
}

std::vector<StepSchedule::Step> to_steps(const std::string& key, const std::string& v) {
    std::vector<StepSchedule::Step> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError({key + ": expected 'time:speed' items"});
        out.push_back({to_double(key, item.substr(0, colon)), to_double(key, item.substr(colon + 1))});
    }
    return out;
}

#define SPRE_D(sec, name, field) {sec "." name, [](Scenario& s, const std::string& v) { s.field = to_double(name, v); }}
#define SPRE_I(sec, name, field) {sec "." name, [](Scenario& s, const std::string& v) { s.field = static_cast<decltype(s.field)>(to_long(name, v)); }}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        SPRE_D("sim", "dt_sim", sim.dt_sim),
        SPRE_D("sim", "duration", sim.duration),
        SPRE_I("sim", "samples_per_rev", sim.estimator_samples_per_rev),
        SPRE_I("sim", "past_window", sim.past_window),
        SPRE_D("sim", "forgetting", sim.forgetting),
        SPRE_I("sim", "n_splines", sim.n_splines),
        SPRE_I("sim", "spline_degree", sim.spline_degree),
        SPRE_I("sim", "horizon_pred", sim.horizon_pred),
        SPRE_I("sim", "horizon_est", sim.horizon_est),
        SPRE_D("sim", "q_output", sim.q_output),
        SPRE_D("sim", "q_theta", sim.q_theta),
        SPRE_D("sim", "q_doutput", sim.q_doutput),
        SPRE_D("sim", "r_input", sim.r_input),
        SPRE_D("sim", "prbs_amplitude", sim.prbs_amplitude),
        SPRE_D("sim", "prbs_cutoff", sim.prbs_cutoff),
        SPRE_I("sim", "rng_seed", sim.rng_seed),
        SPRE_D("sim", "rls_ridge", sim.rls_ridge),
        SPRE_I("sim", "warmup_revs", sim.warmup_revs),
        SPRE_D("sim", "prior_time_constant", sim.prior_time_constant),
        SPRE_D("sim", "initial_speed", sim.initial_speed),
        SPRE_D("sim", "moop_scale", sim.moop_scale),
        SPRE_D("turbine", "air_density", turbine.air.density),
        SPRE_D("turbine", "tsr_opt", turbine.tsr_opt),
        SPRE_D("turbine", "speed_time_constant", turbine.speed_time_constant),
        SPRE_D("surface", "c_a", surface.c_a),
        SPRE_D("surface", "lambda_c", surface.lambda_c),
        SPRE_D("surface", "eps_gravity", surface.eps_gravity),
        SPRE_D("surface", "eps_tower", surface.eps_tower),
        SPRE_D("surface", "tower_width", surface.tower_width),
        SPRE_D("plant", "noise_fraction", plant.noise_fraction),
        SPRE_D("plant", "mismatch_c_a", plant.mismatch_c_a),
        SPRE_D("plant", "mismatch_eps_gravity", plant.mismatch_eps_gravity),
        SPRE_D("plant", "mismatch_eps_tower", plant.mismatch_eps_tower),
        SPRE_D("wind", "shear_exponent", wind.shear_exponent),
        SPRE_D("wind", "wake_ambient_speed", wind.wake.ambient_speed),
        SPRE_D("wind", "wake_turbulence_intensity", wind.wake.turbulence_intensity),
        SPRE_D("wind", "wake_spacing", wind.wake.downstream_spacing),
        SPRE_D("wind", "wake_thrust_coefficient", wind.wake.thrust_coefficient),
        SPRE_D("wind", "wake_offset_start", wind.offset_start_d),
        SPRE_D("wind", "wake_offset_end", wind.offset_end_d),
        {"wind.steps", [](Scenario& s, const std::string& v) { s.wind.steps = to_steps("steps", v); }},
        {"wind.wake", [](Scenario& s, const std::string& v) { s.wind.has_wake = to_bool("wake", v); }},
        {"turbine.rotor_radius",
         [](Scenario& s, const std::string& v) {
             s.turbine.geom = TurbineGeometry::make(to_double("rotor_radius", v), s.turbine.geom.hub_height);
         }},
        {"turbine.hub_height",
         [](Scenario& s, const std::string& v) {
             s.turbine.geom = TurbineGeometry::make(s.turbine.geom.rotor_radius, to_double("hub_height", v));
         }},
    };
    return table;
}

#undef SPRE_D
#undef SPRE_I

boost::property_tree::ptree read_ini(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError({e.what()});
    }
    return tree;
}

Scenario apply_tree(Scenario s, const boost::property_tree::ptree& tree) {
    std::vector<std::string> errors;
    for (const auto& [section, body] : tree) {
        if (section == "scenario") {
            for (const auto& [key, val] : body) {
                if (key == "name") s.name = val.data();
                else if (key != "base") errors.push_back("unknown key scenario." + key);
            }
            continue;
        }
        for (const auto& [key, val] : body) {
            const std::string full = section + "." + key;
            const auto it = setters().find(full);
            if (it == setters().end()) {
                errors.push_back("unknown key " + full);
                continue;
            }
            try {
                it->second(s, val.data());
            } catch (const ConfigError& e) {
                errors.insert(errors.end(), e.violations().begin(), e.violations().end());
            }
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return s;
}

}  // namespace

Scenario apply_overrides(Scenario base, const std::filesystem::path& path) {
    return apply_tree(std::move(base), read_ini(path));
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError({"scenario file not found: " + path.string()});
    const auto tree = read_ini(path);
    Scenario base;
    base.name = path.stem().string();
    if (auto b = tree.get_optional<std::string>("scenario.base")) {
        try {
            base = named_scenario(*b);
        } catch (const std::out_of_range& e) {
            throw ConfigError({e.what()});
        }
        base.name = path.stem().string();
    }
    Scenario s = apply_tree(std::move(base), tree);
    s.validate();
    return s;
}

}  // namespace spre
