// Microbenchmarks covering the compute-heavy paths: model training and
// inference, zone simulation, resampling, and cross-validation.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "occdet/evaluate.hpp"
#include "occdet/forest.hpp"
#include "occdet/knn.hpp"
#include "occdet/logistic.hpp"
#include "occdet/naive_bayes.hpp"
#include "occdet/preprocess.hpp"
#include "occdet/rng.hpp"
#include "occdet/simulate.hpp"
#include "occdet/svm.hpp"

namespace {

using namespace occdet;

// Two Gaussian blobs centered at +/- separation/2 along every axis.
FeatureMatrix blobs(std::size_t rows_per_class, std::size_t cols,
                    double separation, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMatrix m;
  std::vector<Channel> chans;
  for (std::size_t c = 0; c < cols; ++c) chans.push_back(kAllChannels[c]);
  m.features = FeatureSet{chans};
  for (int cls = 0; cls < 2; ++cls) {
    const double center = (cls == 0 ? -0.5 : 0.5) * separation;
    for (std::size_t r = 0; r < rows_per_class; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        m.values.push_back(center + rng.gaussian(0.0, 1.0));
      }
      m.labels.push_back(cls);
    }
  }
  m.rows = m.labels.size();
  return m;
}

void BM_SvmFit(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 2.0, 11);
  SvmParams params;
  params.c = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(svm_fit(m, params));
  }
}
BENCHMARK(BM_SvmFit)->Arg(128)->Arg(256);

void BM_GnbFit(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 1.5, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gnb_fit(m));
  }
}
BENCHMARK(BM_GnbFit)->Arg(256)->Arg(2048);

void BM_LgrFit(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 1.5, 13);
  const LgrParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lgr_fit(m, params));
  }
}
BENCHMARK(BM_LgrFit)->Arg(256)->Arg(1024);

void BM_RfcFit(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 1.0, 14);
  RfcParams params;
  params.n_trees = 25;
  params.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rfc_fit(m, params));
  }
}
BENCHMARK(BM_RfcFit)->Arg(256)->Arg(1024);

void BM_KnnPredict(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 1.0, 15);
  const std::vector<double> query = {0.1, -0.2, 0.3, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn_predict(m, query, 5));
  }
}
BENCHMARK(BM_KnnPredict)->Arg(1024)->Arg(4096);

void BM_SimulateZone(benchmark::State& state) {
  const auto zones = make_paper_zones(static_cast<int>(state.range(0)), 3);
  const auto& zone = zones.front();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_zone(zone.config, zone.schedule, zone.sim_seed));
  }
}
BENCHMARK(BM_SimulateZone)->Arg(1)->Arg(7);

void BM_Resample(benchmark::State& state) {
  const auto zones = make_paper_zones(7, 3);
  const auto samples =
      simulate_zone(zones[0].config, zones[0].schedule, zones[0].sim_seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample(samples, 300));
  }
}
BENCHMARK(BM_Resample);

void BM_CrossValidate(benchmark::State& state) {
  const auto m =
      blobs(static_cast<std::size_t>(state.range(0)) / 2, 4, 1.0, 16);
  const ModelSpec spec = default_spec(ModelKind::gnb);
  CvOptions opt;
  opt.k = 5;
  opt.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cross_validate(m, spec, opt));
  }
}
BENCHMARK(BM_CrossValidate)->Arg(300)->Arg(1200);

}  // namespace

BENCHMARK_MAIN();
