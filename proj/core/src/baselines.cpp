#include "copperbolt/baselines.hpp"

#include <algorithm>

#include "copperbolt/coppersmith.hpp"
#include "copperbolt/numtheory.hpp"
#include "copperbolt/pipeline.hpp"

namespace copperbolt::baselines {

namespace {

struct LeakTable {
  // value per bit index, -1 = not leaked
  std::vector<int> p, q, d;
};

LeakTable index_leaks(const std::vector<cnf::Leak>& leaks, std::size_t k,
                      std::size_t n) {
  LeakTable table;
  table.p.assign(k, -1);
  table.q.assign(k, -1);
  table.d.assign(n, -1);
  for (const cnf::Leak& leak : leaks) {
    std::vector<int>* column = nullptr;
    switch (leak.target) {
      case cnf::LeakTarget::kP: column = &table.p; break;
      case cnf::LeakTarget::kQ: column = &table.q; break;
      case cnf::LeakTarget::kD: column = &table.d; break;
    }
    if (leak.index >= column->size()) {
      throw std::out_of_range("leak index out of range");
    }
    (*column)[leak.index] = leak.value ? 1 : 0;
  }
  return table;
}

bool leak_ok(const std::vector<int>& column, std::size_t index, bool bit) {
  return column[index] == -1 || column[index] == (bit ? 1 : 0);
}

}  // namespace

BnpResult branch_and_prune(const Int& N, std::size_t k,
                           const std::vector<cnf::Leak>& leaks, bool track_d,
                           std::uint64_t branch_limit,
                           const std::chrono::steady_clock::time_point* deadline,
                           std::vector<std::uint64_t>* frontier_sizes) {
  if (N % 2 == 0) throw std::invalid_argument("branch_and_prune: N must be odd");
  const std::size_t n = bit_length(N);
  const LeakTable table = index_leaks(leaks, k, n);
  const Int two_n_plus_3 = 2 * N + 3;

  BnpResult result;
  result.outcome = BnpResult::Outcome::kNoSolution;

  // Depth 1: p0 = q0 = 1 (both factors odd). d_low is determined mod 4.
  std::vector<Partial> frontier;
  if (leak_ok(table.p, 0, true) && leak_ok(table.q, 0, true)) {
    Partial seed{1, 1, 0};
    bool consistent = true;
    if (track_d) {
      const Int mod = 4;
      seed.d_low = nt::mod_inverse(3, mod) * (((two_n_plus_3 - 4) % mod + mod) % mod) % mod;
      for (std::size_t j = 0; j < 2 && j < n; ++j) {
        if (!leak_ok(table.d, j, bit_of(seed.d_low, j))) consistent = false;
      }
    }
    if (consistent) frontier.push_back(std::move(seed));
  }
  result.peak_frontier = frontier.size();
  result.levels_completed = 1;
  if (frontier_sizes != nullptr) frontier_sizes->assign(1, frontier.size());

  for (std::size_t i = 1; i < k && !frontier.empty(); ++i) {
    if (deadline != nullptr && std::chrono::steady_clock::now() >= *deadline) {
      result.outcome = BnpResult::Outcome::kTimeout;
      return result;
    }
    const Int bit_i = Int(1) << i;
    const Int mod_next = bit_i << 1;                    // 2^(i+1)
    const Int d_mod = track_d ? (mod_next << 1) : Int(0);  // 2^(i+2)
    const Int inv3 = track_d ? nt::mod_inverse(3, d_mod) : Int(0);

    std::vector<Partial> next;
    next.reserve(frontier.size() * 2);
    for (const Partial& part : frontier) {
      for (int pb = 0; pb <= 1; ++pb) {
        if (!leak_ok(table.p, i, pb != 0)) continue;
        for (int qb = 0; qb <= 1; ++qb) {
          if (!leak_ok(table.q, i, qb != 0)) continue;
          Partial ext;
          ext.p_low = part.p_low + (pb ? bit_i : 0);
          ext.q_low = part.q_low + (qb ? bit_i : 0);
          if ((ext.p_low * ext.q_low - N) % mod_next != 0) continue;
          if (track_d) {
            Int rhs = (two_n_plus_3 - 2 * (ext.p_low + ext.q_low)) % d_mod;
            if (rhs < 0) rhs += d_mod;
            ext.d_low = inv3 * rhs % d_mod;
            if (i + 1 < n && !leak_ok(table.d, i + 1, bit_of(ext.d_low, i + 1))) {
              continue;
            }
          }
          next.push_back(std::move(ext));
          if (next.size() > branch_limit) {
            result.outcome = BnpResult::Outcome::kBranchExplosion;
            result.peak_frontier =
                std::max(result.peak_frontier, static_cast<std::uint64_t>(next.size()));
            return result;
          }
        }
      }
    }
    frontier = std::move(next);
    result.levels_completed = i + 1;
    result.peak_frontier = std::max(result.peak_frontier,
                                    static_cast<std::uint64_t>(frontier.size()));
    if (frontier_sizes != nullptr) frontier_sizes->push_back(frontier.size());
  }

  for (const Partial& part : frontier) {
    if (part.p_low * part.q_low == N && part.p_low > 1 && part.q_low > 1) {
      Int p = part.p_low, q = part.q_low;
      if (p > q) std::swap(p, q);
      result.outcome = BnpResult::Outcome::kFactors;
      result.factors = std::make_pair(std::move(p), std::move(q));
      return result;
    }
  }
  result.outcome = BnpResult::Outcome::kNoSolution;
  return result;
}

BruteResult brute_force_coppersmith(const Int& N, std::size_t k,
                                    const std::vector<cnf::Leak>& leaks, double theta,
                                    std::size_t unknown_cap,
                                    const std::chrono::steady_clock::time_point* deadline) {
  const std::size_t t = pipeline::threshold_bits(k, N, theta);
  const LeakTable table = index_leaks(leaks, k, bit_length(N));

  BruteResult result;
  result.outcome = BruteResult::Outcome::kExhausted;

  // Fixed part of p's low t bits: leaks plus the structural p0 = 1.
  Int fixed = 1;
  if (table.p[0] == 0) return result;  // contradicts p odd: nothing to try
  std::vector<std::size_t> free_positions;
  for (std::size_t i = 1; i < t; ++i) {
    if (table.p[i] == -1) {
      free_positions.push_back(i);
    } else if (table.p[i] == 1) {
      fixed += Int(1) << i;
    }
  }
  if (free_positions.size() > unknown_cap) {
    throw Infeasible(std::to_string(free_positions.size()) +
                     " unleaked low bits exceed the cap of " +
                     std::to_string(unknown_cap));
  }

  const std::uint64_t total = 1ull << free_positions.size();
  for (std::uint64_t counter = 0; counter < total; ++counter) {
    if (deadline != nullptr && (counter & 0xff) == 0 &&
        std::chrono::steady_clock::now() >= *deadline) {
      result.outcome = BruteResult::Outcome::kTimeout;
      return result;
    }
    Int p_check = fixed;
    for (std::size_t j = 0; j < free_positions.size(); ++j) {
      if ((counter >> j) & 1) p_check += Int(1) << free_positions[j];
    }
    const auto started = std::chrono::steady_clock::now();
    cs::OracleOutcome outcome;
    try {
      outcome = cs::recover_factor_lsb(cs::LsbProblem{N, t, p_check});
    } catch (const std::exception& e) {
      log_info(std::string("brute force oracle error: ") + e.what());
      continue;
    }
    ++result.oracle_calls;
    result.oracle_us += static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started)
            .count());
    if (outcome.found()) {
      result.outcome = BruteResult::Outcome::kFactors;
      result.factors = std::make_pair(outcome.factors->p, outcome.factors->q);
      return result;
    }
  }
  return result;
}

}  // namespace copperbolt::baselines
