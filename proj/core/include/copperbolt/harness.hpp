#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "copperbolt/cnfenc.hpp"
#include "copperbolt/pipeline.hpp"
#include "copperbolt/util.hpp"

namespace copperbolt::harness {

inline constexpr int kSchemaVersion = 1;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// What the solvers are allowed to see.
struct Instance {
  int schema_version = kSchemaVersion;
  Int n;
  std::size_t k = 0;  // factor bitlength
  std::vector<cnf::Leak> leaks;
  bool with_d = false;
  std::uint64_t seed = 0;
};

// Ground truth, kept in a separate file that solvers never read.
struct Truth {
  int schema_version = kSchemaVersion;
  Int p, q;
  std::optional<Int> d;
};

enum class Method { kSat, kSatCas, kBnp, kBrute };

std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct GenResult {
  Instance instance;
  Truth truth;
  std::string dimacs;
};

// Deterministic instance generation: random primes (avoiding 1 mod 3 when the
// d-equation is requested), uniform leak positions per key component at the
// given percentage, the analytically fixed high bits of d added as automatic
// leaks, and the CNF emitted alongside.
GenResult gen(std::size_t n_bits, int leak_pct, bool with_d, std::uint64_t seed);

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text, const std::string& origin = "");
std::string truth_to_json(const Truth& truth);
Truth truth_from_json(const std::string& text, const std::string& origin = "");

struct RunOutcome {
  std::string status;  // ok|timeout|exhausted|explosion|nosolution|infeasible|unsat
  std::optional<std::pair<Int, Int>> factors;
  pipeline::RunStats stats;
  std::uint64_t peak_frontier = 0;
  std::size_t levels_completed = 0;
  Method method = Method::kSatCas;
  std::uint64_t seed = 0;

  bool found() const { return factors.has_value(); }
};

struct SolveOptions {
  Method method = Method::kSatCas;
  double theta = 0.6;
  double timeout_s = 600.0;
  std::optional<std::uint64_t> seed;  // defaults to the instance seed
};

RunOutcome run_method(const Instance& instance, const SolveOptions& options);

// Solve straight from DIMACS text produced by the encoder. The varmap comment
// block is required (it carries the modulus and the bit->variable map used to
// decode factors and to drive the oracle). Only the sat and satcas methods
// apply here.
RunOutcome run_dimacs(const std::string& dimacs_text, const SolveOptions& options);

std::string outcome_to_json(const RunOutcome& outcome);
// 0 when factors were found, 2 on timeout/exhaustion-type outcomes, 1 on
// error-type outcomes.
int outcome_exit_code(const RunOutcome& outcome);

struct BenchConfig {
  std::vector<std::size_t> sizes;  // bits of N
  std::vector<int> leak_pcts;
  std::vector<Method> methods;
  int keys_per_cell = 15;
  bool with_d = false;
  std::uint64_t seed = 0;
  double timeout_s = 600.0;
  double theta = 0.6;
  int workers = 1;
};

// Runs every (size, leak_pct, method) cell on keys_per_cell fresh keys; the
// same keys are used across methods within a cell. Emits one CSV row per run
// (written in deterministic order and flushed as results arrive) plus a
// per-cell median summary where a cell whose runs timed out in at least half
// the cases is reported as "timeout". Returns the number of data rows.
std::size_t bench(const BenchConfig& config, std::ostream& rows_out,
                  std::ostream& summary_out);

// Reads the per-run CSV written by bench and emits tab-separated
// median-vs-size and median-vs-leak series (log2 columns included, timeout
// cells omitted) into out_dir. Returns a human-readable summary table.
std::string report(std::istream& rows_csv, const std::filesystem::path& out_dir);

// 0 iff the result's factors verify against instance.n and match the truth up
// to order.
int verify_result(const Instance& instance, const Truth& truth,
                  const std::string& result_json);

}  // namespace copperbolt::harness
