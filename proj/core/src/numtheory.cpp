#include "copperbolt/numtheory.hpp"

#include <array>

namespace copperbolt::nt {

Int mod_inverse(const Int& a, const Int& n) {
  if (n < 2) throw NotInvertible(a, n);
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t()) == 0) {
    throw NotInvertible(a, n);
  }
  return inv;
}

Int isqrt(const Int& n) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Int inth_root(const Int& n, unsigned k) {
  if (k == 0) throw std::invalid_argument("inth_root: k must be >= 1");
  Int r;
  mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
  return r;
}

Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

namespace {

// One Miller-Rabin round: true if n passes for base a (a already reduced,
// 1 < a < n - 1). n - 1 = d * 2^s with d odd.
bool mr_round(const Int& n, const Int& a, const Int& d, unsigned long s) {
  Int x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = (x * x) % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_probable_prime(const Int& n, int rounds) {
  if (rounds < 1) throw std::invalid_argument("is_probable_prime: rounds >= 1");
  if (n < 2) return false;
  static const std::array<unsigned long, 12> small_primes = {2,  3,  5,  7,  11, 13,
                                                             17, 19, 23, 29, 31, 37};
  for (unsigned long p : small_primes) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }

  Int d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  d >>= s;

  const bool below_64 = bit_length(n) <= 64;
  if (below_64) {
    for (unsigned long a : small_primes) {
      if (!mr_round(n, Int(a), d, s)) return false;
    }
    return true;
  }

  // Bases derived from n so repeated calls agree without an external seed.
  Rng rng(static_cast<std::uint64_t>(mpz_get_ui(n.get_mpz_t())) ^
          (static_cast<std::uint64_t>(bit_length(n)) << 48));
  const Int span = n - 3;
  for (int i = 0; i < rounds; ++i) {
    Int a = 2 + rng.int_below(span);  // a in [2, n-2]
    if (!mr_round(n, a, d, s)) return false;
  }
  return true;
}

Int gen_prime(std::size_t bits, Rng& rng, bool avoid_1_mod_3) {
  if (bits < 3) throw std::invalid_argument("gen_prime: bits must be >= 3");
  constexpr int kStepCap = 10000;
  while (true) {
    Int candidate = rng.bits_with_top_set(bits);
    mpz_setbit(candidate.get_mpz_t(), 0);  // odd
    for (int step = 0; step < kStepCap; ++step, candidate += 2) {
      if (bit_length(candidate) != bits) break;  // stepped past 2^bits
      if (avoid_1_mod_3 && candidate % 3 == 1) continue;
      if (is_probable_prime(candidate)) return candidate;
    }
  }
}

Int gen_prime(std::size_t bits, std::uint64_t seed, bool avoid_1_mod_3) {
  Rng rng(seed);
  return gen_prime(bits, rng, avoid_1_mod_3);
}

}  // namespace copperbolt::nt
