#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "copperbolt/cnfenc.hpp"

namespace copperbolt::sat {

struct MalformedClause : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Read-only view of the solver's current assignment, handed to callbacks.
// Entries are +1 (true), -1 (false) or 0 (unassigned), indexed by var-1.
class AssignmentView {
 public:
  AssignmentView(const std::vector<signed char>* assigns, int level)
      : assigns_(assigns), level_(level) {}

  int num_vars() const { return static_cast<int>(assigns_->size()); }
  bool is_assigned(int var) const { return (*assigns_)[var - 1] != 0; }
  // Only meaningful when is_assigned(var).
  bool value(int var) const { return (*assigns_)[var - 1] > 0; }
  int decision_level() const { return level_; }

 private:
  const std::vector<signed char>* assigns_;
  int level_;
};

// Verdict of one callback invocation. Added clauses must be sound with
// respect to the intended semantics of the formula; they are kept as
// permanent clauses and never garbage-collected. Terminate stops the search
// immediately and surfaces the payload.
struct CallbackResult {
  enum class Action { kContinue, kAddClauses, kTerminate };
  Action action = Action::kContinue;
  std::vector<cnf::Clause> clauses;
  std::any payload;

  static CallbackResult cont() { return {}; }
  static CallbackResult add(std::vector<cnf::Clause> cs) {
    return {Action::kAddClauses, std::move(cs), {}};
  }
  static CallbackResult terminate(std::any payload) {
    return {Action::kTerminate, {}, std::move(payload)};
  }
};

// Invoked at every conflict-free propagation fixpoint at decision level > 0.
using Callback = std::function<CallbackResult(const AssignmentView&)>;

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned_clauses = 0;
  std::uint64_t callback_invocations = 0;
  std::uint64_t callback_clauses = 0;
};

struct SolverOptions {
  std::uint64_t seed = 0;
  double var_decay = 0.95;
  double random_var_freq = 0.0;  // fraction of random decisions
  int luby_base = 64;            // restart unit, in conflicts
  enum class Branching { kVsids, kLowestIndex };
  Branching branching = Branching::kVsids;
};

struct SolveResult {
  enum class Status { kSat, kUnsat, kTerminated };
  Status status;
  std::vector<bool> model;  // indexed by var-1; valid when kSat
  std::any payload;         // valid when kTerminated
  SolverStats stats;
};

// CDCL search: two watched literals, first-UIP clause learning with
// minimization, phase saving, Luby restarts, LBD-aware learned-clause
// reduction. Deterministic for fixed options and callback behavior.
SolveResult solve(const cnf::CnfFormula& formula, const Callback* callback = nullptr,
                  const SolverOptions& options = {});

// Independent verifier: true iff every clause has a true literal.
bool check_model(const cnf::CnfFormula& formula, const std::vector<bool>& model);

}  // namespace copperbolt::sat
