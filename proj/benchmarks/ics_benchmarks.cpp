#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "ics/bayes_spline.hpp"
#include "ics/ics_core.hpp"
#include "ics/mpl.hpp"
#include "ics/rng.hpp"
#include "ics/scatter.hpp"

namespace {

Eigen::MatrixXd fixture_coords(int n, int p) {
    auto gen = ics::substream(8800, 0);
    Eigen::MatrixXd x = ics::normal_matrix(gen, n, p);
    for (int r = 0; r < n / 25; ++r) x((r * 37) % n, 0) += 4.0;
    return x;
}

void BM_EmpiricalCov(benchmark::State& state) {
    const Eigen::MatrixXd x = fixture_coords(1000, 8);
    for (auto _ : state) benchmark::DoNotOptimize(ics::empirical_cov(x));
}
BENCHMARK(BM_EmpiricalCov);

void BM_Cov4(benchmark::State& state) {
    const Eigen::MatrixXd x = fixture_coords(1000, 8);
    const ics::WeightFunction w = ics::WeightFunction::cov4();
    for (auto _ : state) benchmark::DoNotOptimize(ics::empirical_cov_w(x, w));
}
BENCHMARK(BM_Cov4);

void BM_SolveIcs(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const ics::CoordinateSample sample(fixture_coords(1000, p),
                                       ics::GramBasis::identity(p));
    for (auto _ : state) benchmark::DoNotOptimize(ics::solve_ics(sample));
}
BENCHMARK(BM_SolveIcs)->Arg(4)->Arg(16);

void BM_BsplineDesign(benchmark::State& state) {
    const auto spec = ics::SplineSpaceSpec::equally_spaced(0.0, 1.0, 4, 12);
    const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(10000, 0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(ics::bspline_design(spec, t));
}
BENCHMARK(BM_BsplineDesign);

void BM_GramZb(benchmark::State& state) {
    const int knots = static_cast<int>(state.range(0));
    const auto spec = ics::SplineSpaceSpec::equally_spaced(0.0, 1.0, 4, knots);
    for (auto _ : state) benchmark::DoNotOptimize(ics::gram_zb(spec));
}
BENCHMARK(BM_GramZb)->Arg(5)->Arg(20);

void BM_MplFit(benchmark::State& state) {
    auto gen = ics::substream(8801, 0);
    std::normal_distribution<double> d(0.0, 0.8);
    Eigen::VectorXd sample(2000);
    for (int i = 0; i < 2000; ++i) {
        double x;
        do {
            x = d(gen);
        } while (x <= -3.0 || x >= 3.0);
        sample(i) = x;
    }
    const ics::MPLConfig config{ics::SplineSpaceSpec::equally_spaced(-3.0, 3.0, 4, 10),
                                1e-4};
    for (auto _ : state) benchmark::DoNotOptimize(ics::mpl_fit(sample, config));
}
BENCHMARK(BM_MplFit);

} // namespace

BENCHMARK_MAIN();
