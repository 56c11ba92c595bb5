#include <benchmark/benchmark.h>

#include <random>

#include "uat/approx1d.hpp"
#include "uat/fitnd.hpp"
#include "uat/measure.hpp"
#include "uat/surgery.hpp"
#include "uat/target.hpp"

namespace {

uat::Net random_net(std::size_t d, std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> w(n * d), b(n), a(m * n);
  for (auto& v : w) v = u(rng);
  for (auto& v : b) v = u(rng);
  for (auto& v : a) v = u(rng);
  return uat::Net(d, n, m, std::move(w), std::move(b), std::move(a), uat::ActivationKind::ReLU);
}

void BM_EvalNet(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const uat::Net net = random_net(8, n, 4, 1);
  std::vector<double> x(8, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(uat::eval_net(net, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalNet)->Arg(16)->Arg(256)->Arg(4096);

void BM_NetToCpwl(benchmark::State& state) {
  const uat::Net net = random_net(1, static_cast<std::size_t>(state.range(0)), 1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(uat::net_to_cpwl_1d(net));
}
BENCHMARK(BM_NetToCpwl)->Arg(64)->Arg(1024)->Arg(16384);

void BM_ExactL1(benchmark::State& state) {
  const uat::Cpwl1D a = uat::net_to_cpwl_1d(random_net(1, static_cast<std::size_t>(state.range(0)), 1, 3));
  const uat::Cpwl1D b = uat::net_to_cpwl_1d(random_net(1, static_cast<std::size_t>(state.range(0)), 1, 4));
  for (auto _ : state) benchmark::DoNotOptimize(uat::exact_l1_distance_1d(a, b));
}
BENCHMARK(BM_ExactL1)->Arg(64)->Arg(1024)->Arg(16384);

void BM_BuildReluApprox(benchmark::State& state) {
  const uat::Target1D f = uat::make_target("sin2pi");
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(uat::build_relu_approx_1d(f, eps));
}
BENCHMARK(BM_BuildReluApprox)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitRandomFeatures(benchmark::State& state) {
  uat::FitConfig cfg;
  cfg.hidden_count = static_cast<std::size_t>(state.range(0));
  cfg.eval_samples = 0;
  const uat::Field f = [](std::span<const double> x) { return x[0] * x[1]; };
  for (auto _ : state) benchmark::DoNotOptimize(uat::fit_random_features(f, 2, cfg));
}
BENCHMARK(BM_FitRandomFeatures)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const uat::Net net = random_net(2, 64, 1, 5);
  const uat::Field f = [](std::span<const double> x) { return x[0]; };
  const uat::Field g = [&net](std::span<const double> x) { return uat::eval_net(net, x)[0]; };
  for (auto _ : state) benchmark::DoNotOptimize(uat::mc_l1_distance(f, g, 2, 100000, 1));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
