#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace copperbolt {

// Arbitrary-precision integer used throughout. Values named Nat in contracts
// are required to be non-negative; this is checked where it matters.
using Int = mpz_class;

// Number of bits in the binary representation of |n|; bit_length(0) == 0.
std::size_t bit_length(const Int& n);

// Bit i of n (i = 0 is the LSB).
bool bit_of(const Int& n, std::size_t i);

std::string to_hex(const Int& n);
Int from_hex(const std::string& hex);

// Counter-based 64-bit generator (splitmix64). Used wherever reproducibility
// across platforms matters; std::mt19937_64 streams are portable but the
// distributions are not, so all bounded draws go through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, bound) via rejection sampling; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform integer with exactly `bits` bits (top bit set), bits >= 1.
  Int bits_with_top_set(std::size_t bits);

  // Uniform in [0, bound), bound > 0, arbitrary precision.
  Int int_below(const Int& bound);

  // Derive an independent stream, e.g. one per benchmark cell or key.
  Rng fork(std::uint64_t salt) const;

 private:
  std::uint64_t state_;
};

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

// Level is read once from COPPERBOLT_LOG (0/quiet, 1/info, 2/debug).
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace copperbolt
