#include <benchmark/benchmark.h>

#include "nqbell/gyni.hpp"
#include "nqbell/kernels.hpp"
#include "nqbell/upb.hpp"
#include "nqbell/witness.hpp"

using namespace nqbell;

namespace {

BellExpression gyni(int n) { return gyni_game(n, parity_promise(n)).expression; }

// Arg 0: party count.
void BM_VertexScanSerial(benchmark::State& state) {
  const BellExpression e = gyni(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::vertex_scan_serial(e));
}

// Args: party count, threads.
void BM_VertexScanParallel(benchmark::State& state) {
  const BellExpression e = gyni(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::vertex_scan_parallel(e, kDefaultVertexCap, threads));
}

void BM_SaturatingSerial(benchmark::State& state) {
  const BellExpression e = gyni(static_cast<int>(state.range(0)));
  const Rat bound = classical_bound_formula(parity_promise(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::saturating_serial(e, bound));
}

void BM_SaturatingParallel(benchmark::State& state) {
  const BellExpression e = gyni(static_cast<int>(state.range(0)));
  const Rat bound = classical_bound_formula(parity_promise(static_cast<int>(state.range(0))));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::saturating_parallel(e, bound, kDefaultVertexCap, threads));
}

// Arg: threads. Niset-Cerf (4,3) is extendible, so the search finds a witness.
void BM_UpbSearch(benchmark::State& state) {
  const auto s = upb::ProductVectorSet::from(upb::families::niset_cerf(4, 3));
  const upb::UpbOptions o{upb::kDefaultAssignmentCap, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(upb::is_upb(s, o));
}

// Arg: threads.
void BM_SeeSaw(benchmark::State& state) {
  const auto pi = witness::projector_onto_span(upb::ProductVectorSet::from(upb::families::gen_shifts(3)));
  witness::SeeSawOptions o;
  o.starts = 32;
  o.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(witness::epsilon_min(pi, o));
}

}  // namespace

BENCHMARK(BM_VertexScanSerial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VertexScanParallel)->ArgsProduct({{5, 6, 7}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SaturatingSerial)->DenseRange(5, 7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SaturatingParallel)->ArgsProduct({{5, 6, 7}, {1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UpbSearch)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeeSaw)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
