#include "copperbolt/util.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <stdexcept>

namespace copperbolt {

std::size_t bit_length(const Int& n) {
  if (n == 0) return 0;
  return mpz_sizeinbase(n.get_mpz_t(), 2);
}

bool bit_of(const Int& n, std::size_t i) {
  return mpz_tstbit(n.get_mpz_t(), i) != 0;
}

std::string to_hex(const Int& n) {
  return n.get_str(16);
}

Int from_hex(const std::string& hex) {
  Int n;
  if (mpz_set_str(n.get_mpz_t(), hex.c_str(), 16) != 0) {
    throw std::invalid_argument("bad hex integer: " + hex);
  }
  return n;
}

std::uint64_t Rng::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be > 0");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % bound;
}

namespace {
// Uniform integer with exactly `bits` random bits (no top-bit forcing).
Int random_bits(Rng& rng, std::size_t bits) {
  Int value = 0;
  std::size_t remaining = bits;
  while (remaining > 0) {
    const std::size_t take = remaining >= 64 ? 64 : remaining;
    const std::uint64_t mask = take == 64 ? ~0ULL : ((1ULL << take) - 1);
    value <<= take;
    value += Int(static_cast<unsigned long>(rng.next_u64() & mask));
    remaining -= take;
  }
  return value;
}
}  // namespace

Int Rng::bits_with_top_set(std::size_t bits) {
  if (bits == 0) throw std::invalid_argument("bits must be >= 1");
  Int value = random_bits(*this, bits);
  mpz_setbit(value.get_mpz_t(), bits - 1);
  return value;
}

Int Rng::int_below(const Int& bound) {
  if (bound <= 0) throw std::invalid_argument("int_below: bound must be > 0");
  const std::size_t bits = bit_length(bound);
  while (true) {
    Int candidate = random_bits(*this, bits);
    if (candidate < bound) return candidate;
  }
}

Rng Rng::fork(std::uint64_t salt) const {
  Rng child(state_ ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
  child.next_u64();
  return child;
}

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("COPPERBOLT_LOG");
    if (env == nullptr) return LogLevel::kQuiet;
    const std::string v(env);
    if (v == "2" || v == "debug") return LogLevel::kDebug;
    if (v == "1" || v == "info") return LogLevel::kInfo;
    return LogLevel::kQuiet;
  }();
  return level;
}

namespace {
std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) {
    std::lock_guard<std::mutex> lock(log_mutex());
    std::cerr << "[copperbolt] " << msg << "\n";
  }
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) {
    std::lock_guard<std::mutex> lock(log_mutex());
    std::cerr << "[copperbolt:debug] " << msg << "\n";
  }
}

}  // namespace copperbolt
