#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "thinshell/distributions.hpp"
#include "thinshell/moments.hpp"
#include "thinshell/radial1d.hpp"
#include "thinshell/rng.hpp"
#include "thinshell/rotations.hpp"

namespace {

namespace dist = thinshell::distributions;

void BM_PhiloxBlock(benchmark::State& state) {
  std::array<std::uint32_t, 4> ctr{0, 0, 0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(thinshell::CounterRng::philox(ctr, {0x9e3779b9u, 0xbb67ae85u}));
    ++ctr[0];
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_PhiloxBlock);

void BM_NormalDraw(benchmark::State& state) {
  thinshell::CounterRng rng(1, thinshell::Stream::base_sample);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NormalDraw);

void BM_Sample(benchmark::State& state) {
  const auto family = static_cast<dist::Family>(state.range(0));
  const auto spec = dist::make_density(family, 64);
  for (auto _ : state) benchmark::DoNotOptimize(dist::sample(spec, 4096, 7));
  state.SetItemsProcessed(state.iterations() * 4096);
  state.SetLabel(std::string(dist::to_string(family)));
}
BENCHMARK(BM_Sample)->DenseRange(0, static_cast<int>(dist::all_families().size()) - 1);

void BM_RadialMoment(benchmark::State& state) {
  thinshell::radial::RadialFunction w;
  w.evaluator = [](double t) { return std::exp(-t * t / 2.0); };
  w.lo = 0.0;
  w.log_concave = true;
  const double q = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(thinshell::radial::radial_moment(w, q));
}
BENCHMARK(BM_RadialMoment)->Arg(1)->Arg(8)->Arg(32);

void BM_HkpExactGaussian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n / 2; ++i) sigma(i, i) = 2.0;
  const thinshell::rotations::FrameConfig frame{n, 3};
  const auto u = thinshell::rotations::haar_rotation(n, 3, 0);
  for (auto _ : state) benchmark::DoNotOptimize(thinshell::rotations::hkp_exact_gaussian(sigma, u, frame, 2.0));
}
BENCHMARK(BM_HkpExactGaussian)->Arg(12)->Arg(48);

void BM_MomentRatioCurve(benchmark::State& state) {
  const auto norms = thinshell::moments::sample_norms(dist::make_density(dist::Family::gaussian, 64), 20000, 5);
  const std::vector<double> p{-2.0, 1.0, 3.0, 4.0, 8.0};
  for (auto _ : state) benchmark::DoNotOptimize(thinshell::moments::moment_ratio_curve(norms, 64, p, 5));
}
BENCHMARK(BM_MomentRatioCurve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
