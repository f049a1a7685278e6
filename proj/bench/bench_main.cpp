#include <benchmark/benchmark.h>

#include "gmsphere/search.hpp"

using namespace gmsphere;

namespace {

const MetricParams kMetric = MetricParams::make(0.5, 0.5);

void BM_CurvatureTables(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(CheegerGeometry(kMetric));
}
BENCHMARK(BM_CurvatureTables);

void BM_Kappa(benchmark::State& state) {
  const CheegerGeometry geo(kMetric);
  Rng rng = make_rng(1);
  const Vec10 x = geo.to_frame(gaussian_algebra(rng)), y = geo.to_frame(gaussian_algebra(rng));
  for (auto _ : state) benchmark::DoNotOptimize(geo.kappa(x, y));
}
BENCHMARK(BM_Kappa);

void BM_HorizontalForms(benchmark::State& state) {
  const CheegerGeometry geo(kMetric);
  const GroupElement g = haar_sample(3);
  for (auto _ : state) {
    const HorizontalSpace hs(geo, g);
    benchmark::DoNotOptimize(hs.oneill_form());
  }
}
BENCHMARK(BM_HorizontalForms);

void BM_MinKappa(benchmark::State& state) {
  const CheegerGeometry geo(kMetric);
  const HorizontalSpace hs(geo, haar_sample(5));
  MinOptions opt;
  opt.starts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(min_kappa_horizontal(hs, opt));
}
BENCHMARK(BM_MinKappa)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

ScanConfig scan_config(int workers) {
  ScanConfig cfg;
  cfg.metric = kMetric;
  cfg.seed = 7;
  cfg.threshold = 1e-12;
  cfg.workers = workers;
  cfg.sec_m = false;
  return cfg;
}

void BM_ScanSerial(benchmark::State& state) {
  const auto pts = haar_batch(static_cast<std::size_t>(state.range(0)), 7);
  const ScanConfig cfg = scan_config(1);
  for (auto _ : state) benchmark::DoNotOptimize(scan_points_serial(pts, cfg));
}
BENCHMARK(BM_ScanSerial)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ScanParallel(benchmark::State& state) {
  const auto pts = haar_batch(32, 7);
  const ScanConfig cfg = scan_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scan_points(pts, cfg));
}
BENCHMARK(BM_ScanParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
