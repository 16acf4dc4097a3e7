#include <benchmark/benchmark.h>

#include "copperbolt/cnfenc.hpp"
#include "copperbolt/numtheory.hpp"

using namespace copperbolt;

namespace {

void BM_EncodeFactoring(benchmark::State& state) {
  Rng rng(5);
  const std::size_t k = state.range(0) / 2;
  Int p = nt::gen_prime(k, rng, false);
  Int q = nt::gen_prime(k, rng, false);
  while (q == p) q = nt::gen_prime(k, rng, false);
  const Int N = p * q;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cnf::encode_factoring(N, k));
  }
}

void BM_EncodeWithExponent(benchmark::State& state) {
  Rng rng(6);
  const std::size_t k = state.range(0) / 2;
  Int p = nt::gen_prime(k, rng, true);
  Int q = nt::gen_prime(k, rng, true);
  while (q == p) q = nt::gen_prime(k, rng, true);
  const Int N = p * q;
  for (auto _ : state) {
    auto [formula, vm] = cnf::encode_factoring(N, k);
    cnf::encode_d_equation(formula, vm, N);
    benchmark::DoNotOptimize(formula);
  }
}

}  // namespace

BENCHMARK(BM_EncodeFactoring)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_EncodeWithExponent)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
