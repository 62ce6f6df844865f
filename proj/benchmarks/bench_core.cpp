#include <benchmark/benchmark.h>

#include <random>

#include "hecke/hecke_search.hpp"
#include "hecke/hypergeometric.hpp"
#include "hecke/triangle.hpp"

using namespace hecke;

namespace {

const PrimeIdealData& prime() {
  static const PrimeIdealData p = default_prime_ideal(43);
  return p;
}

const ComponentMaps& maps(Precision prec) {
  static const ComponentMaps m128(EmbeddingConfig{}, PrecisionContext::with_precision(128), true);
  static const ComponentMaps m256(EmbeddingConfig{}, PrecisionContext::with_precision(256), true);
  return prec == 128 ? m128 : m256;
}

const std::vector<HeckeMatrix>& alphas() {
  static const std::vector<HeckeMatrix> a = enumerate_alpha(prime(), 3.0).matrices;
  return a;
}

void BM_FieldMultiply(benchmark::State& state) {
  const IntegralElement x{3, -1, 4, 1, -5, 9}, y{2, 6, -5, 3, 5, -8};
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_FieldMultiply);

void BM_Norm(benchmark::State& state) {
  const IntegralElement x{3, -1, 4, 1, -5, 9};
  for (auto _ : state) benchmark::DoNotOptimize(norm(x));
}
BENCHMARK(BM_Norm);

void BM_Hyp2f1(benchmark::State& state) {
  const auto ctx = PrecisionContext::with_precision(state.range(0));
  const HypergeometricParams p = HypergeometricParams::triangle_14_21_42();
  const Complex w(0.4, 0.7, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hyp2f1(p, w, ctx));
}
BENCHMARK(BM_Hyp2f1)->Arg(128)->Arg(256)->Arg(512);

void BM_SchwarzInverse(benchmark::State& state) {
  const auto ctx = PrecisionContext::with_precision(state.range(0));
  const SchwarzTriangle t(TriangleData::standard(), ctx);
  const Complex z = t.map(Complex(0.3, 0.9, state.range(0)));
  benchmark::DoNotOptimize(t.inverse(z));
  for (auto _ : state) benchmark::DoNotOptimize(t.inverse(z));
}
BENCHMARK(BM_SchwarzInverse)->Arg(128)->Arg(256);

void BM_Reduce(benchmark::State& state) {
  const SchwarzTriangle& t = maps(128).triangle(1);
  const Complex z(0.37, 0.02, 128);
  for (auto _ : state) benchmark::DoNotOptimize(reduce_to_fundamental(t, z));
}
BENCHMARK(BM_Reduce);

void BM_EnumerateAlpha(benchmark::State& state) {
  const double h = static_cast<double>(state.range(0)) / 2;
  prime();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_alpha(prime(), h));
}
BENCHMARK(BM_EnumerateAlpha)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_FixedTuple(benchmark::State& state) {
  const HeckeMatrix& a = alphas().front();
  for (auto _ : state) benchmark::DoNotOptimize(fixed_tuple(a, 128));
}
BENCHMARK(BM_FixedTuple);

void BM_Prescreen(benchmark::State& state) {
  for (auto _ : state)
    for (const auto& a : alphas()) benchmark::DoNotOptimize(prescreen_mod_ell(a, prime()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(alphas().size()));
}
BENCHMARK(BM_Prescreen);

void BM_EvaluateAlpha(benchmark::State& state) {
  SearchConfig cfg;
  const HeckeMatrix& a = alphas().front();
  for (auto _ : state) {
    SearchCounters c;
    benchmark::DoNotOptimize(evaluate_alpha(a, 0, cfg, prime(), maps(128), c));
  }
}
BENCHMARK(BM_EvaluateAlpha)->Unit(benchmark::kMillisecond);

void BM_VerifyCertificate(benchmark::State& state) {
  SearchConfig cfg;
  SearchCounters c;
  const auto cert = evaluate_alpha(alphas().front(), 0, cfg, prime(), maps(128), c);
  for (auto _ : state) benchmark::DoNotOptimize(verify_certificate(*cert, prime(), &maps(256), 256, 1e-20));
}
BENCHMARK(BM_VerifyCertificate)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const FixedTuple ft = fixed_tuple(alphas().front(), 128);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_alpha(ft.w, prime().generator));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
