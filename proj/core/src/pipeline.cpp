#include "copperbolt/pipeline.hpp"

#include <cmath>

#include "copperbolt/numtheory.hpp"

namespace copperbolt::pipeline {

std::size_t threshold_bits(std::size_t k, const Int& N, double theta) {
  if (!(theta > 0.5) || theta > 1.0) {
    throw std::invalid_argument("theta must satisfy 0.5 < theta <= 1");
  }
  const Int X = nt::inth_root(N, 5) / 4;
  if (X == 0) {
    throw cs::BoundTooSmall("root bound X is zero for N = " + N.get_str());
  }
  const std::size_t floor_log2_x = bit_length(X) - 1;
  // ceil(theta*k) computed in exact permille arithmetic so e.g. theta = 0.6,
  // k = 35 yields 21, not 22.
  const std::uint64_t permille = static_cast<std::uint64_t>(std::llround(theta * 1000.0));
  const std::size_t from_theta =
      static_cast<std::size_t>((permille * k + 999) / 1000);
  const std::size_t from_bound = k > floor_log2_x ? k - floor_log2_x : 0;
  const std::size_t t = std::max(from_theta, from_bound);
  if (t >= k) {
    throw ThresholdExceedsK("threshold " + std::to_string(t) +
                            " leaves no unknown bits for k = " + std::to_string(k));
  }
  return t;
}

std::optional<Int> extract_low_bits(const sat::AssignmentView& view,
                                    const cnf::VarMap& vm, std::size_t t) {
  Int value = 0;
  for (std::size_t i = t; i-- > 0;) {
    const int var = vm.p_bits[i];
    if (!view.is_assigned(var)) return std::nullopt;
    value <<= 1;
    if (view.value(var)) value += 1;
  }
  return value;
}

cnf::Clause blocking_clause(const sat::AssignmentView& view, const cnf::VarMap& vm,
                            std::size_t t) {
  cnf::Clause clause;
  clause.reserve(t);
  for (std::size_t i = 0; i < t; ++i) {
    const int var = vm.p_bits[i];
    if (!view.is_assigned(var)) {
      throw std::logic_error("blocking_clause: low bits incomplete");
    }
    clause.push_back(view.value(var) ? -var : var);
  }
  return clause;
}

sat::CallbackResult CoppersmithOracle::operator()(const sat::AssignmentView& view) {
  std::optional<Int> low = extract_low_bits(view, vm_, t_);
  if (!low.has_value()) {
    last_seen_.reset();
    return sat::CallbackResult::cont();
  }
  // The low-bit pattern did not change since the previous fixpoint; nothing
  // new to tell the oracle.
  if (last_seen_.has_value() && *last_seen_ == *low) {
    return sat::CallbackResult::cont();
  }
  last_seen_ = *low;

  if (memo_.count(*low) != 0) {
    ++stats_.memo_hits;
    ++stats_.blocking_clauses;
    return sat::CallbackResult::add({blocking_clause(view, vm_, t_)});
  }

  // Pruning observation: when q's low bits are forced too, the product of the
  // two low parts should already match N modulo 2^t.
  {
    Int q_low = 0;
    bool q_assigned = true;
    for (std::size_t i = t_; i-- > 0;) {
      const int var = vm_.q_bits[i];
      if (!view.is_assigned(var)) {
        q_assigned = false;
        break;
      }
      q_low <<= 1;
      if (view.value(var)) q_low += 1;
    }
    if (q_assigned) {
      ++stats_.oracle_calls_q_assigned;
      const Int mod = Int(1) << t_;
      if ((*low * q_low - modulus_) % mod == 0) ++stats_.oracle_calls_q_congruent;
    }
  }

  const auto started = std::chrono::steady_clock::now();
  cs::OracleOutcome outcome;
  try {
    outcome = cs::recover_factor_lsb(cs::LsbProblem{modulus_, t_, *low});
  } catch (const std::exception& e) {
    log_info(std::string("oracle error, continuing without verdict: ") + e.what());
    return sat::CallbackResult::cont();
  }
  stats_.oracle_us += static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - started)
          .count());
  ++stats_.oracle_calls;

  if (outcome.found()) {
    return sat::CallbackResult::terminate(*outcome.factors);
  }
  memo_.insert(*low);
  ++stats_.blocking_clauses;
  return sat::CallbackResult::add({blocking_clause(view, vm_, t_)});
}

namespace {

struct TimeoutSignal {};

Int decode_bits(const std::vector<bool>& model, const std::vector<int>& bits) {
  Int value = 0;
  for (std::size_t i = bits.size(); i-- > 0;) {
    value <<= 1;
    if (model[bits[i] - 1]) value += 1;
  }
  return value;
}

}  // namespace

FactorResult factor(const Int& N, std::size_t k, const std::vector<cnf::Leak>& leaks,
                    const HybridConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  auto [formula, vm] = cnf::encode_factoring(N, k);
  if (config.use_d_encoding) cnf::encode_d_equation(formula, vm, N);
  cnf::add_leak_units(formula, vm, leaks);

  RunStats stats;
  Method method = config.method;
  std::optional<std::size_t> threshold;
  if (method == Method::kSatCas) {
    try {
      threshold = threshold_bits(k, N, config.theta);
    } catch (const std::exception& e) {
      log_info(std::string("hybrid threshold unavailable, falling back to sat-only: ") +
               e.what());
      method = Method::kSatOnly;
    }
  }

  std::optional<CoppersmithOracle> oracle;
  if (method == Method::kSatCas) {
    oracle.emplace(N, vm, *threshold, stats);
  }
  const bool has_deadline = config.time_limit.count() > 0;
  const auto deadline = started + config.time_limit;

  sat::Callback callback = [&](const sat::AssignmentView& view) -> sat::CallbackResult {
    ++stats.callback_invocations;
    if (has_deadline && std::chrono::steady_clock::now() >= deadline) {
      return sat::CallbackResult::terminate(TimeoutSignal{});
    }
    if (oracle.has_value()) return (*oracle)(view);
    return sat::CallbackResult::cont();
  };

  sat::SolverOptions options;
  options.seed = config.seed;
  const sat::SolveResult result = sat::solve(formula, &callback, options);

  stats.conflicts = result.stats.conflicts;
  stats.decisions = result.stats.decisions;
  stats.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started)
          .count());

  Int p, q;
  switch (result.status) {
    case sat::SolveResult::Status::kUnsat:
      throw UnsatEncoding("no factorization consistent with the encoding and leaks");
    case sat::SolveResult::Status::kSat:
      p = decode_bits(result.model, vm.p_bits);
      q = decode_bits(result.model, vm.q_bits);
      break;
    case sat::SolveResult::Status::kTerminated: {
      if (std::any_cast<TimeoutSignal>(&result.payload) != nullptr) {
        throw Timeout("time limit exceeded after " + std::to_string(stats.wall_ms) +
                      " ms");
      }
      const auto* factors = std::any_cast<cs::Factors>(&result.payload);
      if (factors == nullptr) throw std::logic_error("unexpected termination payload");
      p = factors->p;
      q = factors->q;
      break;
    }
  }
  if (p > q) std::swap(p, q);
  if (!verify_factors(N, p, q)) {
    throw std::logic_error("internal error: solver produced a bad factorization of " +
                           N.get_str());
  }
  return FactorResult{std::move(p), std::move(q), stats};
}

bool verify_factors(const Int& N, const Int& p, const Int& q) {
  return p > 1 && p <= q && q < N && p * q == N;
}

}  // namespace copperbolt::pipeline
