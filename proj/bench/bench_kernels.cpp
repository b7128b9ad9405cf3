#include <benchmark/benchmark.h>

#include <random>

#include "polaron/pimc/action.hpp"
#include "polaron/pt/two_body.hpp"

using namespace polaron;

namespace {

struct TwoBodyFixture {
  std::shared_ptr<const pt::InternalGrid> grid = pt::default_internal_grid(1.0);
  pt::TwoBodyOperator op{grid};
  Eigen::VectorXd x = Eigen::VectorXd::Random(op.dim());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(op.dim());
  std::vector<double> potential = std::vector<double>(grid->n_r(), -0.3);
};

TwoBodyFixture& two_body() {
  static TwoBodyFixture f;
  return f;
}

pimc::Paths random_paths(int n, int slices) {
  pimc::Paths p(n, 32.0, slices);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int a = 0; a < n; ++a)
    for (int k = 0; k < slices; ++k) p.set_position(a, k, Eigen::Vector3d(g(rng) + a, g(rng), g(rng)));
  return p;
}

void BM_TwoBodyApply(benchmark::State& s) {
  auto& f = two_body();
  for (auto _ : s) {
    f.op.apply(f.x, f.potential, 1.0, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_TwoBodyApplyReference(benchmark::State& s) {
  auto& f = two_body();
  for (auto _ : s) {
    f.op.apply_reference(f.x, f.potential, 1.0, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_Action(benchmark::State& s) {
  const int slices = static_cast<int>(s.range(0));
  const auto paths = random_paths(2, slices);
  const pimc::ActionKernel kernel(32.0, slices);
  for (auto _ : s) benchmark::DoNotOptimize(pimc::action_interaction(paths, kernel));
}

void BM_ActionReference(benchmark::State& s) {
  const int slices = static_cast<int>(s.range(0));
  const auto paths = random_paths(2, slices);
  const pimc::ActionKernel kernel(32.0, slices);
  for (auto _ : s) benchmark::DoNotOptimize(pimc::action_interaction_reference(paths, kernel));
}

}  // namespace

BENCHMARK(BM_TwoBodyApply)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoBodyApplyReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Action)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ActionReference)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
