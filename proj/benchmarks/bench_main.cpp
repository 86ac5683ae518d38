#include <benchmark/benchmark.h>

#include <string>

#include "tq/bks.hpp"
#include "tq/model_io.hpp"
#include "tq/quantization.hpp"

namespace {

std::string model_path(const char* stem) {
  return std::string(TQ_MODELS_DIR) + "/" + stem + ".json";
}

const tq::ToricModel& cp1() {
  static const tq::ToricModel model = tq::load_model(model_path("cp1"));
  return model;
}

const tq::ToricModel& blowup() {
  static const tq::ToricModel model = tq::load_model(model_path("blowup"));
  return model;
}

void BM_BuildModel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::load_model(model_path("blowup")));
  }
}
BENCHMARK(BM_BuildModel);

void BM_PotentialJet(benchmark::State& state) {
  Eigen::VectorXd x(2);
  x << -0.3, 1.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::potential_jet(blowup(), 2.0, x));
  }
}
BENCHMARK(BM_PotentialJet);

void BM_LegendreInverse(benchmark::State& state) {
  Eigen::VectorXd y(2);
  y << 0.7, -1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::legendre_inverse(blowup(), 1.5, y));
  }
}
BENCHMARK(BM_LegendreInverse);

void BM_NormSquared1d(benchmark::State& state) {
  tq::QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const double s = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::norm_squared(cp1(), s, {1}, opts));
  }
}
BENCHMARK(BM_NormSquared1d)->Arg(10)->Arg(640);

void BM_NormSquared2d(benchmark::State& state) {
  tq::QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const double s = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::norm_squared(blowup(), s, {0, 1}, opts));
  }
}
BENCHMARK(BM_NormSquared2d)->Arg(10)->Arg(640);

void BM_BksEntry(benchmark::State& state) {
  tq::QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::bks_entry(cp1(), 1.0, 3.0, {1}, opts));
  }
}
BENCHMARK(BM_BksEntry);

void BM_DeltaPairing(benchmark::State& state) {
  tq::QuadratureOptions opts;
  opts.rel_tol = 1e-8;
  const tq::Polynomial one = tq::Polynomial::constant(1, tq::Rational(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tq::delta_pairing(cp1(), 640.0, {1}, one, opts));
  }
}
BENCHMARK(BM_DeltaPairing);

}  // namespace

BENCHMARK_MAIN();
