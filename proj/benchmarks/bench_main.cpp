#include <benchmark/benchmark.h>

#include <random>

#include "stabnet/factorization.hpp"
#include "stabnet/haag.hpp"
#include "stabnet/fusion.hpp"

using namespace stabnet;

namespace {

std::shared_ptr<const Graph> fibonacci() {
  return std::make_shared<const Graph>(Graph::load(std::string(STABNET_DATA_DIR) + "/graphs/fibonacci.json"));
}

std::vector<PartialPermutation> boundary_generators(const LocalAlgebra& A) {
  std::vector<PartialPermutation> gens;
  const Interval S = A.support();
  for (const Interval C : {Interval(S.lo, S.lo), Interval(S.hi, S.hi)})
    for (auto& p : included_interval_generators(restricted_algebra(A, C), A)) gens.push_back(std::move(p));
  return gens;
}

}  // namespace

static void BM_EnumeratePaths(benchmark::State& state) {
  const auto g = fibonacci();
  const auto len = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(PathTable(*g, len));
}
BENCHMARK(BM_EnumeratePaths)->DenseRange(4, 16, 4);

static void BM_DenseCommutant(benchmark::State& state) {
  const LocalAlgebra A(fibonacci(), Interval(0, state.range(0) - 1));
  std::vector<BlockOperator> gens;
  for (const auto& p : boundary_generators(A)) gens.push_back(p.dense());
  for (auto _ : state) benchmark::DoNotOptimize(commutant(gens, A));
}
BENCHMARK(BM_DenseCommutant)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_UnitCommutant(benchmark::State& state) {
  const LocalAlgebra A(fibonacci(), Interval(0, state.range(0) - 1));
  const auto gens = boundary_generators(A);
  for (auto _ : state) benchmark::DoNotOptimize(unit_commutant(gens, A));
}
BENCHMARK(BM_UnitCommutant)->DenseRange(3, 7)->Unit(benchmark::kMillisecond);

static void BM_StabilizedHaag(benchmark::State& state) {
  const auto g = std::make_shared<const Graph>(Graph::single_vertex(1));
  const auto D = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(haag_check(g, Interval(0, 3), SiteSet({0, 2}), D, 1e-10));
}
BENCHMARK(BM_StabilizedHaag)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

static void BM_LambdaFamily(benchmark::State& state) {
  const auto g = fibonacci();
  const auto D = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(LambdaFamily(g, 3, 1, D));
}
BENCHMARK(BM_LambdaFamily)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_Alpha(benchmark::State& state) {
  const LambdaFamily fam(fibonacci(), 2, 1, static_cast<std::size_t>(state.range(0)));
  const auto sectors = admissible_sectors({&fam}, {1, 2});
  std::mt19937_64 rng(0);
  const auto a = random_admissible_operator(sectors, rng);
  for (auto _ : state) benchmark::DoNotOptimize(alpha_sparse(a, fam));
}
BENCHMARK(BM_Alpha)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_Pentagon(benchmark::State& state) {
  const auto fd = FusionData::parse_file(std::string(STABNET_DATA_DIR) + "/fusion/ising.json");
  for (auto _ : state) benchmark::DoNotOptimize(verify_pentagon(fd));
}
BENCHMARK(BM_Pentagon);
BENCHMARK_MAIN();
