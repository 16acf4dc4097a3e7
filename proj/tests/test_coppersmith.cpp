#include "copperbolt/coppersmith.hpp"

#include <algorithm>

#include "copperbolt/numtheory.hpp"
#include "copperbolt/polyint.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace copperbolt;
using namespace copperbolt::cs;

namespace {

// A semiprime with factor bitlength k and the number of known low bits that
// both the theta = 0.6 rule and the lattice bound allow.
struct Generated {
  Int N, p, q;
  std::size_t m;
};

Generated make_instance(std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  Int p = nt::gen_prime(k, rng, false);
  Int q = nt::gen_prime(k, rng, false);
  while (q == p) q = nt::gen_prime(k, rng, false);
  if (p > q) std::swap(p, q);
  const Int N = p * q;
  const Int X = nt::inth_root(N, 5) / 4;
  const std::size_t floor_log2_x = bit_length(X) - 1;
  const std::size_t m =
      std::max((6 * k + 9) / 10, k > floor_log2_x ? k - floor_log2_x : 0);
  return {N, p, q, m};
}

}  // namespace

TEST_CASE("msb basis rows follow the column scaling") {
  const auto basis = build_msb_basis({16803551, 2830, 10});
  REQUIRE(basis.rows.size() == 4);
  CHECK(basis.rows[0] == std::vector<Int>{16803551, 0, 0, 0});
  CHECK(basis.rows[1] == std::vector<Int>{2830, 10, 0, 0});
  CHECK(basis.rows[2] == std::vector<Int>{0, 28300, 100, 0});
  CHECK(basis.rows[3] == std::vector<Int>{0, 0, 283000, 1000});
}

TEST_CASE("lsb basis shape, scaling and determinant") {
  const Generated g = make_instance(16, 5);
  const LsbBasis built = build_lsb_basis({g.N, g.m, g.p % (Int(1) << g.m)});
  REQUIRE(built.basis.rows.size() == 5);
  CHECK(built.X == nt::inth_root(g.N, 5) / 4);
  CHECK(built.c == nt::mod_inverse(Int(1) << g.m, g.N) * (g.p % (Int(1) << g.m)) % g.N);
  CHECK(built.basis.rows[0] == std::vector<Int>{g.N * g.N, 0, 0, 0, 0});
  CHECK(built.basis.rows[2] ==
        std::vector<Int>{built.c * built.c, 2 * built.c * built.X,
                         built.X * built.X, 0, 0});
  // Triangular, so the determinant is the diagonal product N^3 X^10.
  Int x10 = 1;
  for (int i = 0; i < 10; ++i) x10 *= built.X;
  CHECK(lattice::exact_determinant(built.basis) == g.N * g.N * g.N * x10);
}

TEST_CASE("lsb basis rows vanish mod p at the true root") {
  const Generated g = make_instance(20, 6);
  const Int p_check = g.p % (Int(1) << g.m);
  const LsbBasis built = build_lsb_basis({g.N, g.m, p_check});
  const Int root = (g.p - p_check) >> g.m;
  for (const auto& row : built.basis.rows) {
    const poly::IntPoly poly = poly::row_to_poly(row, built.X);
    CHECK(poly::eval_at(poly, root) % g.p == 0);
  }
}

TEST_CASE("bound-zero modulus is rejected") {
  CHECK_THROWS_AS(build_lsb_basis({Int(15), 2, Int(3)}), BoundTooSmall);
}

TEST_CASE("small_roots recovers the planted root of the demo basis") {
  const auto roots = small_roots(build_msb_basis({16803551, 2830, 10}), 10);
  CHECK(std::count(roots.begin(), roots.end(), Int(7)) == 1);
}

TEST_CASE("small_roots finds the high part from correct low bits") {
  // 40-bit semiprime; the known-bit count follows the lattice bound.
  const Generated g = make_instance(20, 7);
  const Int p_check = g.p % (Int(1) << g.m);
  const LsbBasis built = build_lsb_basis({g.N, g.m, p_check});
  const auto roots = small_roots(built.basis, built.X);
  const Int expected = (g.p - p_check) >> g.m;
  CHECK(std::count(roots.begin(), roots.end(), expected) == 1);
}

TEST_CASE("msb recovery factors the demo modulus") {
  const OracleOutcome outcome = recover_factor_msb({16803551, 2830, 10});
  REQUIRE(outcome.found());
  CHECK(outcome.factors->p == 2837);
  CHECK(outcome.factors->q == 5923);
}

TEST_CASE("msb recovery with all bits known uses root zero") {
  const OracleOutcome outcome = recover_factor_msb({16803551, 2837, 1});
  REQUIRE(outcome.found());
  CHECK(outcome.factors->p == 2837);
  CHECK(outcome.factors->q == 5923);
}

TEST_CASE("msb recovery reports failure for wrong high bits") {
  // No integer in [2830, 2850] other than 2837 divides 16803551.
  const OracleOutcome outcome = recover_factor_msb({16803551, 2840, 10});
  CHECK_FALSE(outcome.found());
}

TEST_CASE("lsb recovery factors a 64-bit modulus from correct low bits") {
  const Generated g = make_instance(32, 8);
  const OracleOutcome outcome =
      recover_factor_lsb({g.N, g.m, g.p % (Int(1) << g.m)});
  REQUIRE(outcome.found());
  CHECK(outcome.factors->p == g.p);
  CHECK(outcome.factors->q == g.q);
  CHECK(outcome.factors->p * outcome.factors->q == g.N);
}

TEST_CASE("lsb recovery certifies failure for a flipped low bit") {
  const Generated g = make_instance(32, 9);
  const Int wrong = (g.p % (Int(1) << g.m)) ^ 4;  // flip bit 2, parity kept
  const OracleOutcome outcome = recover_factor_lsb({g.N, g.m, wrong});
  CHECK_FALSE(outcome.found());
  // Oracle: neither prime factor has those low bits.
  const Int mod = Int(1) << g.m;
  CHECK(g.p % mod != wrong);
  CHECK(g.q % mod != wrong);
}

TEST_CASE("lsb recovery with every bit known factors via root zero") {
  const Generated g = make_instance(16, 10);
  const std::size_t m = bit_length(g.p);
  const OracleOutcome outcome = recover_factor_lsb({g.N, m, g.p});
  REQUIRE(outcome.found());
  CHECK(outcome.factors->p == g.p);
}

TEST_CASE("blocking soundness against exhaustive enumeration at 12-bit scale") {
  const auto primes = testoracle::primes_with_bits(12);
  Rng rng(11);
  for (int trial = 0; trial < 2; ++trial) {
    const Int p = primes[rng.below(primes.size())];
    Int q = primes[rng.below(primes.size())];
    while (q == p) q = primes[rng.below(primes.size())];
    const Int N = p * q;
    const std::size_t t = 10;  // satisfies 2^(k-t) <= X here
    const Int x_bound = nt::inth_root(N, 5) / 4;
    REQUIRE((Int(1) << (12 - t) <= x_bound));
    for (Int pattern = 1; pattern < (Int(1) << t); pattern += 2) {
      const OracleOutcome outcome = recover_factor_lsb({N, t, pattern});
      bool some_prime_fits = false;
      for (const Int& candidate : primes) {
        if (candidate % (Int(1) << t) == pattern && N % candidate == 0) {
          some_prime_fits = true;
          break;
        }
      }
      CHECK(outcome.found() == some_prime_fits);
      if (outcome.found()) {
        CHECK(outcome.factors->p * outcome.factors->q == N);
        CHECK(outcome.factors->p > 1);
      }
    }
  }
}
