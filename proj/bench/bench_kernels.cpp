// Serial reference vs OpenMP for each data-parallel kernel.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "spre/kernels.hpp"

using namespace spre;

namespace {

void cone_values(benchmark::State& st, bool parallel) {
    const ConeGrid grid = ConeGrid::defaults();
    std::vector<double> out(ConeTable::value_count(grid));
    for (auto _ : st) {
        if (parallel) {
            kernels::omp::fill_cone_values(ConeSurface{}, TurbineGeometry{}, AirProperties{}, grid, out);
        } else {
            kernels::serial::fill_cone_values(ConeSurface{}, TurbineGeometry{}, AirProperties{}, grid, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(out.size()));
}

void forward_substitute(benchmark::State& st, bool parallel) {
    const int block = 3, band = 12, P = static_cast<int>(st.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 0.1);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(block * P, block * P);
    for (int s = 1; s < P; ++s) {
        for (int d = 1; d <= band && s - d >= 0; ++d) {
            for (int i = 0; i < block; ++i) {
                for (int j = 0; j < block; ++j) g(s * block + i, (s - d) * block + j) = nd(rng);
            }
        }
    }
    const Eigen::MatrixXd rhs = Eigen::MatrixXd::Random(block * P, 3 * block * P);
    for (auto _ : st) {
        Eigen::MatrixXd x = rhs;
        if (parallel) {
            kernels::omp::forward_substitute(g, x, block, band);
        } else {
            kernels::serial::forward_substitute(g, x, block, band);
        }
        benchmark::DoNotOptimize(x.data());
    }
}

void plane(benchmark::State& st, bool parallel) {
    const int n = static_cast<int>(st.range(0));
    const WindField f = WindField::composite({StepSchedule::constant(12.0), 0.2, 90.0}, WakeField{}, 60.0, 0.0, 600.0);
    std::vector<double> ys(static_cast<std::size_t>(n)), zs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ys[static_cast<std::size_t>(i)] = -63.0 + 126.0 * i / (n - 1);
        zs[static_cast<std::size_t>(i)] = 27.0 + 126.0 * i / (n - 1);
    }
    std::vector<double> out(ys.size() * zs.size());
    for (auto _ : st) {
        if (parallel) {
            kernels::omp::sample_plane(f, ys, zs, 100.0, out);
        } else {
            kernels::serial::sample_plane(f, ys, zs, 100.0, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(out.size()));
}

}  // namespace

BENCHMARK_CAPTURE(cone_values, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(cone_values, omp, true)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(forward_substitute, serial, false)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(forward_substitute, omp, true)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(plane, serial, false)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(plane, omp, true)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
