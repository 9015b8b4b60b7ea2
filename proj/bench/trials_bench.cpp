// Serial vs OpenMP comparison for the trial kernels.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "genbound/estimators.hpp"
#include "genbound/testbeds.hpp"
#include "genbound/trials.hpp"

using namespace genbound;

namespace {

struct BitSource {
  using Point = int;
  using Model = int;
  Point sample(CounterRng& rng) const { return rng.bernoulli(0.5) ? 1 : 0; }
  Model fit(const std::vector<Point>& train) const {
    int ones = 0;
    for (int p : train) ones += p;
    return 2 * ones >= (int)train.size() ? 1 : 0;
  }
  double loss(const Model& m, const Point& p) const { return m == p ? 0.0 : 1.0; }
  std::int32_t data_key(const Point& p) const { return p; }
  int loss_levels() const { return 2; }
};

void bm_supersample(benchmark::State& state, RunMode mode) {
  BitSource src;
  int n = (int)state.range(0);
  for (auto _ : state) {
    SupersampleBatch batch = run_supersample_trials(src, n, 20000, 1, mode);
    benchmark::DoNotOptimize(batch.trials.data());
  }
}

void bm_glm(benchmark::State& state, RunMode mode) {
  GLMConfig cfg;
  cfg.n = 50;
  cfg.m_trials = (int)state.range(0);
  cfg.seed = 1;
  RunOptions opt;
  opt.mode = mode;
  opt.resamples = 200;
  for (auto _ : state) {
    TestbedReport report = glm_run(cfg, opt);
    benchmark::DoNotOptimize(report.empirical_gap);
  }
}

// the bootstrap loop is the parallel hot path on the estimation side; pin
// the OpenMP thread count to compare against a single-threaded run
void bm_ldmi_bootstrap(benchmark::State& state, int threads) {
  BitSource src;
  SupersampleBatch batch = run_supersample_trials(src, 16, 20000, 1);
  PerSampleMiStat stat(batch, PerSampleMiStat::Kind::ldmi, Conditioning::none);
  auto value = [&stat](std::span<const int> idx) { return stat.total(idx); };
  int saved = omp_get_max_threads();
  if (threads > 0) omp_set_num_threads(threads);
  for (auto _ : state) {
    Interval ci = bootstrap_ci(value, batch.m_trials, 200, 0.95, 2);
    benchmark::DoNotOptimize(ci.lo);
  }
  omp_set_num_threads(saved);
}

}  // namespace

BENCHMARK_CAPTURE(bm_supersample, serial, RunMode::serial)->Arg(16);
BENCHMARK_CAPTURE(bm_supersample, parallel, RunMode::parallel)->Arg(16);
BENCHMARK_CAPTURE(bm_glm, serial, RunMode::serial)->Arg(50000);
BENCHMARK_CAPTURE(bm_glm, parallel, RunMode::parallel)->Arg(50000);
BENCHMARK_CAPTURE(bm_ldmi_bootstrap, one_thread, 1);
BENCHMARK_CAPTURE(bm_ldmi_bootstrap, all_threads, -1);

BENCHMARK_MAIN();
