#include "copperbolt/satcore.hpp"

#include <set>

#include "doctest.h"
#include "oracles.hpp"

using namespace copperbolt;
using namespace copperbolt::sat;
using copperbolt::cnf::CnfFormula;

namespace {

CnfFormula make_formula(int num_vars, std::vector<cnf::Clause> clauses) {
  CnfFormula f;
  f.num_vars = num_vars;
  f.clauses = std::move(clauses);
  return f;
}

CnfFormula random_formula(Rng& rng, int num_vars, int num_clauses) {
  CnfFormula f;
  f.num_vars = num_vars;
  for (int c = 0; c < num_clauses; ++c) {
    cnf::Clause clause;
    const std::size_t width = 1 + rng.below(3);
    for (std::size_t i = 0; i < width; ++i) {
      const int var = 1 + static_cast<int>(rng.below(num_vars));
      clause.push_back(rng.below(2) == 0 ? var : -var);
    }
    f.clauses.push_back(clause);
  }
  return f;
}

}  // namespace

TEST_CASE("contradictory units are unsatisfiable") {
  const auto result = solve(make_formula(1, {{1}, {-1}}));
  CHECK(result.status == SolveResult::Status::kUnsat);
}

TEST_CASE("a single clause is satisfiable and the model checks") {
  const auto formula = make_formula(2, {{1, 2}});
  const auto result = solve(formula);
  REQUIRE(result.status == SolveResult::Status::kSat);
  CHECK(check_model(formula, result.model));
}

TEST_CASE("factoring formula for 35 solves to the 5*7 model") {
  auto [formula, vm] = cnf::encode_factoring(35, 3);
  const auto result = solve(formula);
  REQUIRE(result.status == SolveResult::Status::kSat);
  REQUIRE(check_model(formula, result.model));
  auto decode = [&](const std::vector<int>& bits) {
    Int v = 0;
    for (std::size_t i = bits.size(); i-- > 0;) v = v * 2 + (result.model[bits[i] - 1] ? 1 : 0);
    return v;
  };
  const Int p = decode(vm.p_bits), q = decode(vm.q_bits);
  CHECK(p * q == 35);
}

TEST_CASE("check_model spots a falsified clause") {
  const auto formula = make_formula(1, {{1}});
  CHECK_FALSE(check_model(formula, {false}));
  CHECK(check_model(formula, {true}));
}

TEST_CASE("solver verdict matches exhaustive search on random formulas") {
  Rng rng(101);
  for (int trial = 0; trial < 120; ++trial) {
    const int num_vars = 3 + static_cast<int>(rng.below(9));
    const CnfFormula formula =
        random_formula(rng, num_vars, 2 + static_cast<int>(rng.below(30)));
    const bool expected = testoracle::satisfiable_exhaustive(formula);
    const auto result = solve(formula);
    if (expected) {
      REQUIRE(result.status == SolveResult::Status::kSat);
      CHECK(check_model(formula, result.model));
    } else {
      CHECK(result.status == SolveResult::Status::kUnsat);
    }
  }
}

TEST_CASE("models agree with naive propagation on forced variables") {
  Rng rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    CnfFormula formula = random_formula(rng, 8, 10);
    formula.clauses.push_back({1 + static_cast<int>(rng.below(8))});  // seed a unit
    const auto naive = testoracle::propagate_naive(formula);
    const auto result = solve(formula);
    if (naive.conflict) {
      CHECK(result.status == SolveResult::Status::kUnsat);
      continue;
    }
    if (result.status != SolveResult::Status::kSat) continue;  // deeper conflict
    for (const auto& [var, value] : naive.forced) {
      CHECK(result.model[var - 1] == value);
    }
  }
}

TEST_CASE("runs are deterministic") {
  auto [formula, vm] = cnf::encode_factoring(143, 4);  // 11 * 13
  const auto a = solve(formula);
  const auto b = solve(formula);
  REQUIRE(a.status == SolveResult::Status::kSat);
  CHECK(a.model == b.model);
  CHECK(a.stats.conflicts == b.stats.conflicts);
  CHECK(a.stats.decisions == b.stats.decisions);
  CHECK(a.stats.propagations == b.stats.propagations);
}

TEST_CASE("an always-continue callback does not change the run") {
  auto [formula, vm] = cnf::encode_factoring(143, 4);
  const auto bare = solve(formula);
  int invocations = 0;
  const Callback cb = [&](const AssignmentView&) {
    ++invocations;
    return CallbackResult::cont();
  };
  const auto observed = solve(formula, &cb);
  CHECK(observed.status == bare.status);
  CHECK(observed.model == bare.model);
  CHECK(observed.stats.conflicts == bare.stats.conflicts);
  CHECK(observed.stats.decisions == bare.stats.decisions);
  CHECK(invocations > 0);
  CHECK(observed.stats.callback_invocations == static_cast<std::uint64_t>(invocations));
}

TEST_CASE("callback can terminate with a payload") {
  const auto formula = make_formula(2, {{1, 2}});
  const Callback cb = [](const AssignmentView&) {
    return CallbackResult::terminate(42);
  };
  const auto result = solve(formula, &cb);
  REQUIRE(result.status == SolveResult::Status::kTerminated);
  CHECK(std::any_cast<int>(result.payload) == 42);
}

TEST_CASE("callback is only invoked above decision level zero") {
  // Everything is forced by units, so no fixpoint above level 0 exists.
  const auto formula = make_formula(2, {{1}, {-2}});
  int invocations = 0;
  const Callback cb = [&](const AssignmentView&) {
    ++invocations;
    return CallbackResult::cont();
  };
  const auto result = solve(formula, &cb);
  CHECK(result.status == SolveResult::Status::kSat);
  CHECK(invocations == 0);
}

TEST_CASE("clauses added by the callback steer the search") {
  // Free variables 1..4; the callback blocks every assignment whose var-1 bit
  // is false, so any model must set var 1.
  const auto formula = make_formula(4, {{1, -1, 2}});  // tautology: no constraints
  const Callback cb = [](const AssignmentView& view) {
    if (view.is_assigned(1) && !view.value(1)) {
      return CallbackResult::add({{1}});
    }
    return CallbackResult::cont();
  };
  const auto result = solve(formula, &cb);
  REQUIRE(result.status == SolveResult::Status::kSat);
  CHECK(result.model[0]);
}

TEST_CASE("callback clauses participate in unsatisfiability") {
  const auto formula = make_formula(2, {{1, 2}});
  const Callback cb = [](const AssignmentView& view) {
    // Block every complete assignment of vars 1 and 2.
    if (view.is_assigned(1) && view.is_assigned(2)) {
      cnf::Clause block;
      block.push_back(view.value(1) ? -1 : 1);
      block.push_back(view.value(2) ? -2 : 2);
      return CallbackResult::add({block});
    }
    return CallbackResult::cont();
  };
  const auto result = solve(formula, &cb);
  CHECK(result.status == SolveResult::Status::kUnsat);
}

TEST_CASE("blocking the current partial assignment forces a new one") {
  auto [formula, vm] = cnf::encode_factoring(35, 3);
  std::set<Int> seen_p_lows;
  const Callback cb = [&](const AssignmentView& view) {
    // Track and block the low two bits of p once assigned.
    if (!view.is_assigned(vm.p_bits[1])) return CallbackResult::cont();
    const Int low = (view.value(vm.p_bits[1]) ? 2 : 0) + 1;
    if (seen_p_lows.insert(low).second) {
      return CallbackResult::add(
          {{view.value(vm.p_bits[1]) ? -vm.p_bits[1] : vm.p_bits[1]}});
    }
    return CallbackResult::cont();
  };
  const auto result = solve(formula, &cb);
  // Both polarities of p_1 get blocked eventually: 5 = 101 and 7 = 111 both
  // die, so the formula ends up unsatisfiable.
  CHECK(result.status == SolveResult::Status::kUnsat);
  CHECK(seen_p_lows.size() == 2);
}

TEST_CASE("malformed clauses are rejected") {
  CHECK_THROWS_AS(solve(make_formula(2, {{1, 0}})), MalformedClause);
  CHECK_THROWS_AS(solve(make_formula(2, {{3}})), MalformedClause);
  const auto formula = make_formula(2, {{1, 2}});
  const Callback cb = [](const AssignmentView&) {
    return CallbackResult::add({{5}});
  };
  CHECK_THROWS_AS(solve(formula, &cb), MalformedClause);
}

TEST_CASE("seeded random decisions stay deterministic") {
  auto [formula, vm] = cnf::encode_factoring(143, 4);
  SolverOptions options;
  options.random_var_freq = 0.2;
  options.seed = 9;
  const auto a = solve(formula, nullptr, options);
  const auto b = solve(formula, nullptr, options);
  REQUIRE(a.status == SolveResult::Status::kSat);
  CHECK(a.model == b.model);
  CHECK(a.stats.decisions == b.stats.decisions);
}
