#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "copperbolt/cnfenc.hpp"
#include "copperbolt/util.hpp"

namespace copperbolt::baselines {

// Too many unleaked low bits of p to enumerate.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Low-to-high partial key at bit depth i: p_low, q_low mod 2^i, and when d is
// tracked, d_low mod 2^(i+1). Invariants: p_low*q_low == N (mod 2^i) and
// 3*d_low + 2*(p_low+q_low) == 2N+3 (mod 2^(i+1)).
struct Partial {
  Int p_low, q_low, d_low;
};

struct BnpResult {
  enum class Outcome { kFactors, kBranchExplosion, kNoSolution, kTimeout };
  Outcome outcome;
  std::optional<std::pair<Int, Int>> factors;  // p <= q when kFactors
  std::uint64_t peak_frontier = 0;
  std::size_t levels_completed = 0;

  bool found() const { return outcome == Outcome::kFactors; }
};

// Breadth-first key reconstruction from the low bits upward: at depth i keep
// exactly the partial keys consistent with N mod 2^i, the leaks, and (when
// track_d) the e=3 exponent relation. The frontier is capped at branch_limit.
// When frontier_sizes is given it receives the surviving-frontier size after
// each completed depth.
BnpResult branch_and_prune(
    const Int& N, std::size_t k, const std::vector<cnf::Leak>& leaks, bool track_d,
    std::uint64_t branch_limit = 1ull << 22,
    const std::chrono::steady_clock::time_point* deadline = nullptr,
    std::vector<std::uint64_t>* frontier_sizes = nullptr);

struct BruteResult {
  enum class Outcome { kFactors, kExhausted, kTimeout };
  Outcome outcome;
  std::optional<std::pair<Int, Int>> factors;
  std::uint64_t oracle_calls = 0;
  std::uint64_t oracle_us = 0;

  bool found() const { return outcome == Outcome::kFactors; }
};

// Enumerates every assignment of the unleaked bits among p's low t bits
// (t from the same threshold rule the hybrid uses; leaked bits fixed; p0 = 1)
// in ascending numeric order, calling the LSB factor recovery for each.
// Throws Infeasible when more than `unknown_cap` low bits are unleaked.
BruteResult brute_force_coppersmith(
    const Int& N, std::size_t k, const std::vector<cnf::Leak>& leaks,
    double theta = 0.6, std::size_t unknown_cap = 30,
    const std::chrono::steady_clock::time_point* deadline = nullptr);

}  // namespace copperbolt::baselines
