#include <benchmark/benchmark.h>

#include "copperbolt/coppersmith.hpp"
#include "copperbolt/lattice.hpp"
#include "copperbolt/numtheory.hpp"

using namespace copperbolt;

namespace {

cs::LsbProblem problem_for_bits(std::size_t n_bits, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = n_bits / 2;
  Int p = nt::gen_prime(k, rng, false);
  Int q = nt::gen_prime(k, rng, false);
  while (q == p) q = nt::gen_prime(k, rng, false);
  const Int N = p * q;
  const Int X = nt::inth_root(N, 5) / 4;
  const std::size_t m =
      std::max((6 * k + 9) / 10, k - (bit_length(X) - 1));
  return {N, m, p % (Int(1) << m)};
}

void BM_LllReduceRecoveryBasis(benchmark::State& state) {
  const auto problem = problem_for_bits(state.range(0), 1);
  const cs::LsbBasis built = cs::build_lsb_basis(problem);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lattice::lll_reduce(built.basis));
  }
}

void BM_RandomBasisReduce(benchmark::State& state) {
  Rng rng(7);
  lattice::LatticeBasis basis;
  const std::size_t dim = state.range(0);
  do {
    basis.rows.assign(dim, std::vector<Int>(dim));
    for (auto& row : basis.rows) {
      for (auto& e : row) e = Int(rng.below(2000001)) - 1000000;
    }
  } while (lattice::exact_determinant(basis) == 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lattice::lll_reduce(basis));
  }
}

}  // namespace

BENCHMARK(BM_LllReduceRecoveryBasis)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_RandomBasisReduce)->Arg(2)->Arg(3)->Arg(4)->Arg(5);
