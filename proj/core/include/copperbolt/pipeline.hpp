#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>

#include "copperbolt/cnfenc.hpp"
#include "copperbolt/coppersmith.hpp"
#include "copperbolt/satcore.hpp"

namespace copperbolt::pipeline {

struct ThresholdExceedsK : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Timeout : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The encoding (plus leaks) admits no model. Either a caller bug or leaks
// inconsistent with any factorization; never silently swallowed.
struct UnsatEncoding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { kSatCas, kSatOnly };

struct HybridConfig {
  double theta = 0.6;  // fraction of low bits of p required before the oracle runs
  Method method = Method::kSatCas;
  bool use_d_encoding = false;
  std::uint64_t seed = 0;
  std::chrono::milliseconds time_limit{0};  // zero = unlimited
};

struct RunStats {
  std::uint64_t callback_invocations = 0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t blocking_clauses = 0;
  std::uint64_t oracle_us = 0;  // total oracle time, microseconds
  std::uint64_t wall_ms = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  // Pruning observation: of the oracle calls where q's low bits were also
  // assigned, how many satisfied p_check * q_check == N (mod 2^t).
  std::uint64_t oracle_calls_q_assigned = 0;
  std::uint64_t oracle_calls_q_congruent = 0;
};

// t = max(ceil(theta*k), k - floor(log2 X)) with X = floor(N^(1/5)/4), so the
// unknown width k-t always satisfies 2^(k-t) <= X. Throws ThresholdExceedsK
// when t >= k (instance too small for the hybrid) and propagates BoundTooSmall
// when X = 0.
std::size_t threshold_bits(std::size_t k, const Int& N, double theta);

// Value of p's low t bits if all are assigned, otherwise nullopt.
std::optional<Int> extract_low_bits(const sat::AssignmentView& view,
                                    const cnf::VarMap& vm, std::size_t t);

// Disjunction negating the current values of p's low t bits; requires all of
// them assigned. Falsified by exactly the current low-bit pattern.
cnf::Clause blocking_clause(const sat::AssignmentView& view, const cnf::VarMap& vm,
                            std::size_t t);

// The programmatic oracle: at each fixpoint where p's low t bits are complete,
// run the LSB factor recovery. Success terminates the search with the factors;
// failure adds a blocking clause. Failed patterns are memoized so a repeat
// (e.g. across restarts) is re-blocked without another lattice reduction.
class CoppersmithOracle {
 public:
  CoppersmithOracle(Int modulus, const cnf::VarMap& vm, std::size_t t,
                    RunStats& stats)
      : modulus_(std::move(modulus)), vm_(vm), t_(t), stats_(stats) {}

  sat::CallbackResult operator()(const sat::AssignmentView& view);

 private:
  Int modulus_;
  const cnf::VarMap& vm_;
  std::size_t t_;
  RunStats& stats_;
  std::set<Int> memo_;
  std::optional<Int> last_seen_;
};

struct FactorResult {
  Int p, q;  // p <= q
  RunStats stats;
};

// End-to-end driver: encode, add leaks (and the d-equation when configured),
// register the oracle for the satcas method, solve, decode. Throws Timeout
// when the time limit is hit and UnsatEncoding when the formula is
// unsatisfiable.
FactorResult factor(const Int& N, std::size_t k, const std::vector<cnf::Leak>& leaks,
                    const HybridConfig& config);

bool verify_factors(const Int& N, const Int& p, const Int& q);

}  // namespace copperbolt::pipeline
