#pragma once

#include <cstdint>
#include <stdexcept>

#include "copperbolt/util.hpp"

namespace copperbolt::nt {

struct NotInvertible : std::runtime_error {
  NotInvertible(const Int& a, const Int& n)
      : std::runtime_error("no inverse of " + a.get_str() + " mod " + n.get_str()) {}
};

// Modular inverse: returns b with a*b == 1 (mod n), 0 < b < n.
// Requires gcd(a, n) == 1 and n >= 2; throws NotInvertible otherwise.
Int mod_inverse(const Int& a, const Int& n);

// Floor square root: r with r^2 <= n < (r+1)^2.
Int isqrt(const Int& n);

// Floor k-th root: r with r^k <= n < (r+1)^k, k >= 1.
Int inth_root(const Int& n, unsigned k);

Int gcd(const Int& a, const Int& b);

// Miller-Rabin. false => composite; true => prime except with probability
// <= 4^-rounds. Deterministic below 2^64 via the fixed witness set
// {2,3,5,7,11,13,17,19,23,29,31,37}; above that, `rounds` bases drawn from a
// stream seeded by n itself, so the result is a pure function of the inputs.
bool is_probable_prime(const Int& n, int rounds = 40);

// Random prime with exactly `bits` bits (top bit set), odd, deterministic
// given seed. With avoid_1_mod_3, additionally p mod 3 != 1. Candidates are
// sampled uniformly, stepped by 2 up to 10^4 times, then resampled.
Int gen_prime(std::size_t bits, std::uint64_t seed, bool avoid_1_mod_3);
Int gen_prime(std::size_t bits, Rng& rng, bool avoid_1_mod_3);

}  // namespace copperbolt::nt
