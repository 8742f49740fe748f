#include <benchmark/benchmark.h>

#include <axiograd/attribution.hpp>
#include <axiograd/axioms.hpp>
#include <axiograd/cases.hpp>
#include <axiograd/grad.hpp>
#include <axiograd/max_expr.hpp>
#include <axiograd/taylor.hpp>

namespace {

using namespace axiograd;

void BM_IgAnalytic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CaseGenerator gen(1, n);
  const Model f = gen.model(n, ModelFamily::kAnalytic);
  const Vec xb = gen.point();
  const Vec xp = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(ig(f, xb, xp));
}
BENCHMARK(BM_IgAnalytic)->Arg(2)->Arg(4)->Arg(8);

void BM_IgTanhNet(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  CaseGenerator gen(2, 4);
  const Model f(gen.tanh_net(4, {width, width}));
  const Vec xb = gen.point();
  const Vec xp = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(ig(f, xb, xp));
}
BENCHMARK(BM_IgTanhNet)->Arg(8)->Arg(32);

void BM_IgReluNetWithKinks(benchmark::State& state) {
  CaseGenerator gen(3, 3);
  const Model f(gen.relu_net(3, {8, 8}));
  const Vec xb = gen.point();
  const Vec xp = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(ig(f, xb, xp));
}
BENCHMARK(BM_IgReluNetWithKinks);

void BM_PowerPath(benchmark::State& state) {
  CaseGenerator gen(4, 3);
  const Model f = gen.model(3, ModelFamily::kPolynomial);
  const Vec xb = gen.point();
  const Vec xp = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(path_attribution(f, PathSpec::power(), xb, xp));
}
BENCHMARK(BM_PowerPath);

void BM_Shapley(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  CaseGenerator gen(5, n);
  const Model f = gen.model(n, ModelFamily::kPolynomial);
  const Vec xb = gen.point();
  const Vec xp = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(shapley(f, xb, xp));
}
BENCHMARK(BM_Shapley)->Arg(4)->Arg(6)->Arg(8);

void BM_Gradient(benchmark::State& state) {
  CaseGenerator gen(6, 4);
  const Model f = gen.model(4, ModelFamily::kAnalytic);
  const Vec x = gen.point();
  for (auto _ : state) benchmark::DoNotOptimize(grad(f, x));
}
BENCHMARK(BM_Gradient);

void BM_Taylor(benchmark::State& state) {
  const auto order = static_cast<unsigned>(state.range(0));
  const AnalyticExpr f = AnalyticExpr::exp(AnalyticExpr::variable(0) + AnalyticExpr::variable(1));
  const Vec center{0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(taylor(f, center, order));
}
BENCHMARK(BM_Taylor)->Arg(4)->Arg(8)->Arg(12);

void BM_AxiomCheck(benchmark::State& state) {
  const Method m = method_by_name("ig");
  CheckOptions opt;
  opt.cases = 20;
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(check_axiom(Axiom::kCompleteness, m, opt));
}
BENCHMARK(BM_AxiomCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
