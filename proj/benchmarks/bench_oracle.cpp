#include <benchmark/benchmark.h>

#include "copperbolt/coppersmith.hpp"
#include "copperbolt/numtheory.hpp"

using namespace copperbolt;

namespace {

void BM_LsbRecovery(benchmark::State& state) {
  Rng rng(3);
  const std::size_t k = state.range(0) / 2;
  Int p = nt::gen_prime(k, rng, false);
  Int q = nt::gen_prime(k, rng, false);
  while (q == p) q = nt::gen_prime(k, rng, false);
  const Int N = p * q;
  const Int X = nt::inth_root(N, 5) / 4;
  const std::size_t m = std::max((6 * k + 9) / 10, k - (bit_length(X) - 1));
  const Int p_check = p % (Int(1) << m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::recover_factor_lsb({N, m, p_check}));
  }
}

// The typical in-search call: a pattern that does not extend to a factor.
void BM_LsbRejection(benchmark::State& state) {
  Rng rng(4);
  const std::size_t k = state.range(0) / 2;
  Int p = nt::gen_prime(k, rng, false);
  Int q = nt::gen_prime(k, rng, false);
  while (q == p) q = nt::gen_prime(k, rng, false);
  const Int N = p * q;
  const Int X = nt::inth_root(N, 5) / 4;
  const std::size_t m = std::max((6 * k + 9) / 10, k - (bit_length(X) - 1));
  const Int wrong = (p % (Int(1) << m)) ^ 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cs::recover_factor_lsb({N, m, wrong}));
  }
}

}  // namespace

BENCHMARK(BM_LsbRecovery)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_LsbRejection)->Arg(64)->Arg(128)->Arg(256);
