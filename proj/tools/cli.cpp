#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "spre/runner.hpp"

namespace spre {

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kRuntime = 2;

Scenario resolve_scenario(const std::string& arg) {
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), arg) != names.end()) return named_scenario(arg);
    if (std::filesystem::is_regular_file(arg)) return load_scenario_file(arg);
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError({"unknown scenario '" + arg + "'; available: " + list});
}

void print_config_error(std::ostream& err, const ConfigError& e) {
    err << "config error:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
}

void print_metrics(std::ostream& out, const Metrics& m) {
    out << "bews_rmse  " << m.bews_rmse[0] << ' ' << m.bews_rmse[1] << ' ' << m.bews_rmse[2] << " m/s\n"
        << "rews_bias  " << m.rews_bias << " m/s\n"
        << "rews_rmse  " << m.rews_rmse << " m/s\n"
        << "azimuth of max BEWS  " << m.azimuth_max_deg << " deg\n"
        << "azimuth of min BEWS  " << m.wake_sector_azimuth << " deg\n";
    for (std::size_t k = 0; k < m.segments.size(); ++k) {
        const SegmentMetrics& s = m.segments[k];
        out << "segment " << k << "  t=[" << s.t_start << ", " << s.t_end << "]  revs=" << s.revolutions
            << "  moop_rms first5=" << s.moop_rms_first5 << " last5=" << s.moop_rms_last5 << " (noise-free " << s.moop_true_rms_first5 << " / "
            << s.moop_true_rms_last5 << ")"
            << "  rews_rel_err_max=" << s.rews_rel_error_max << '\n';
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Periodic-load blade effective wind speed estimator"};
    app.require_subcommand(1);

    std::string table_out = "cone_table.csv";
    std::string table_scenario = "step-shear";
    auto* build = app.add_subcommand("build-table", "Tabulate the cone coefficient surface");
    build->add_option("--out", table_out, "Output table file");
    build->add_option("--scenario", table_scenario, "Scenario whose surface and grid are tabulated");

    std::string scenario_arg, out_dir, table_in;
    std::uint64_t seed = 0;
    bool dump_xi = false, dump_field = false;
    auto* run = app.add_subcommand("run", "Run a closed-loop scenario");
    run->add_option("--scenario", scenario_arg, "Scenario name or definition file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Random seed");
    run->add_option("--table", table_in, "Cone table file (built from the scenario when omitted)");
    run->add_flag("--dump-xi", dump_xi, "Write the identified Markov matrix per revolution");
    run->add_flag("--dump-field", dump_field, "Write rotor-plane wind field slices");

    std::string metrics_in, metrics_out;
    auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a time series");
    metrics->add_option("--in", metrics_in, "timeseries.csv")->required();
    metrics->add_option("--out", metrics_out, "Write metrics CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kConfig;
    }

    try {
        if (*build) {
            const Scenario s = resolve_scenario(table_scenario);
            s.validate();
            const ConeTable t = build_table(s.surface, s.turbine.geom, s.turbine.air, s.grid);
            write_table(t, table_out);
            out << "wrote " << table_out << " (" << t.values().size() << " values)\n";
        } else if (*run) {
            Scenario s = resolve_scenario(scenario_arg);
            if (*seed_opt) s.sim.rng_seed = seed;
            s.validate();
            RunOptions opt;
            opt.dump_xi = dump_xi;
            opt.dump_field = dump_field;
            if (!table_in.empty()) {
                if (!std::filesystem::is_regular_file(table_in)) {
                    throw ConfigError({"table file not found: " + table_in});
                }
                opt.table = std::make_shared<const ConeTable>(read_table(table_in));
            }
            const auto t0 = std::chrono::steady_clock::now();
            const RunResult r = run_scenario(s, opt);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_outputs(s, r, out_dir, opt);
            out << s.name << ": " << r.series.size() << " station rows, " << r.revolutions.size()
                << " revolutions, " << r.frozen_events << " frozen, " << secs << " s\n";
            if (r.metrics) {
                print_metrics(out, *r.metrics);
            } else {
                err << "warning: run too short for metrics; metrics.csv not written\n";
            }
        } else if (*metrics) {
            const TimeSeries ts = read_timeseries(metrics_in);
            const Metrics m = compute_metrics(ts);
            print_metrics(out, m);
            if (!metrics_out.empty()) write_metrics(m, metrics_out);
        }
    } catch (const ConfigError& e) {
        print_config_error(err, e);
        return kConfig;
    } catch (const InsufficientData& e) {
        err << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

}  // namespace spre
