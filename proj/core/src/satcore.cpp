#include "copperbolt/satcore.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "copperbolt/util.hpp"

namespace copperbolt::sat {

namespace {

// Internal literal encoding: lit = 2*var + sign, var 0-based, sign 1 = negated.
inline int make_lit(int dimacs) {
  const int v = std::abs(dimacs) - 1;
  return 2 * v + (dimacs < 0 ? 1 : 0);
}
inline int lit_var(int lit) { return lit >> 1; }
inline bool lit_sign(int lit) { return lit & 1; }
inline int lit_neg(int lit) { return lit ^ 1; }

constexpr std::uint32_t kInvalidRef = std::numeric_limits<std::uint32_t>::max();

// Max-heap over variables keyed by activity, ties broken by lower index so
// runs are reproducible.
class VarOrderHeap {
 public:
  explicit VarOrderHeap(const std::vector<double>& activity) : activity_(activity) {}

  void grow(int num_vars) { position_.resize(num_vars, -1); }

  bool contains(int v) const { return position_[v] >= 0; }
  bool empty() const { return heap_.empty(); }

  void insert(int v) {
    if (contains(v)) return;
    position_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(position_[v]);
  }

  int remove_max() {
    const int top = heap_[0];
    swap_at(0, static_cast<int>(heap_.size()) - 1);
    position_[top] = -1;
    heap_.pop_back();
    if (!heap_.empty()) sift_down(0);
    return top;
  }

  void increased(int v) {
    if (contains(v)) sift_up(position_[v]);
  }

  const std::vector<int>& raw() const { return heap_; }

 private:
  bool above(int a, int b) const {
    return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b);
  }
  void swap_at(int i, int j) {
    std::swap(heap_[i], heap_[j]);
    position_[heap_[i]] = i;
    position_[heap_[j]] = j;
  }
  void sift_up(int i) {
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!above(heap_[i], heap_[parent])) break;
      swap_at(i, parent);
      i = parent;
    }
  }
  void sift_down(int i) {
    const int n = static_cast<int>(heap_.size());
    while (true) {
      const int l = 2 * i + 1, r = 2 * i + 2;
      int best = i;
      if (l < n && above(heap_[l], heap_[best])) best = l;
      if (r < n && above(heap_[r], heap_[best])) best = r;
      if (best == i) break;
      swap_at(i, best);
      i = best;
    }
  }

  const std::vector<double>& activity_;
  std::vector<int> heap_;
  std::vector<int> position_;
};

double luby(double y, int x) {
  int size, seq;
  for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1) {
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  return std::pow(y, seq);
}

class Solver {
 public:
  Solver(const cnf::CnfFormula& formula, const Callback* callback,
         const SolverOptions& options)
      : options_(options), callback_(callback), rng_(options.seed) {
    num_vars_ = formula.num_vars;
    assigns_.assign(num_vars_, 0);
    phase_.assign(num_vars_, 0);  // default decision polarity: false
    level_.assign(num_vars_, 0);
    reason_.assign(num_vars_, kInvalidRef);
    activity_.assign(num_vars_, 0.0);
    seen_.assign(num_vars_, 0);
    lbd_stamp_.assign(num_vars_ + 1, 0);  // indexed by decision level
    watches_.assign(2 * static_cast<std::size_t>(num_vars_), {});
    order_.grow(num_vars_);
    for (int v = 0; v < num_vars_; ++v) order_.insert(v);

    for (const cnf::Clause& clause : formula.clauses) {
      if (!add_input_clause(clause)) {
        ok_ = false;
        return;
      }
    }
  }

  SolveResult run() {
    SolveResult result;
    result.stats = stats_;
    if (!ok_) {
      result.status = SolveResult::Status::kUnsat;
      result.stats = stats_;
      return result;
    }

    int restart_count = 0;
    std::uint64_t restart_budget =
        static_cast<std::uint64_t>(luby(2.0, restart_count) * options_.luby_base);
    std::uint64_t conflicts_at_restart = 0;
    double max_learnts = std::max<double>(2000.0, clauses_count_ / 3.0);
    std::uint64_t adjust_counter = 100;
    double adjust_limit = 100.0;

    while (true) {
      const std::uint32_t confl = propagate();
      if (confl != kInvalidRef) {
        ++stats_.conflicts;
        if (decision_level() == 0) {
          result.status = SolveResult::Status::kUnsat;
          result.stats = stats_;
          return result;
        }
        handle_conflict(confl);
        if (--adjust_counter == 0) {
          adjust_limit *= 1.5;
          adjust_counter = static_cast<std::uint64_t>(adjust_limit);
          max_learnts *= 1.1;
        }
        continue;
      }

      // Conflict-free fixpoint.
      if (callback_ != nullptr && decision_level() > 0) {
        ++stats_.callback_invocations;
        const AssignmentView view(&assigns_, decision_level());
        CallbackResult verdict = (*callback_)(view);
        if (verdict.action == CallbackResult::Action::kTerminate) {
          result.status = SolveResult::Status::kTerminated;
          result.payload = std::move(verdict.payload);
          result.stats = stats_;
          return result;
        }
        if (verdict.action == CallbackResult::Action::kAddClauses) {
          bool consistent = true;
          for (const cnf::Clause& clause : verdict.clauses) {
            ++stats_.callback_clauses;
            if (!add_external_clause(clause)) {
              consistent = false;
              break;
            }
          }
          if (!consistent) {
            result.status = SolveResult::Status::kUnsat;
            result.stats = stats_;
            return result;
          }
          continue;  // re-propagate before anything else
        }
      }

      if (stats_.conflicts - conflicts_at_restart >= restart_budget) {
        ++restart_count;
        ++stats_.restarts;
        restart_budget =
            static_cast<std::uint64_t>(luby(2.0, restart_count) * options_.luby_base);
        conflicts_at_restart = stats_.conflicts;
        cancel_until(0);
        continue;
      }

      if (static_cast<double>(learnts_.size()) >= max_learnts + trail_.size()) {
        reduce_db();
      }

      if (static_cast<int>(trail_.size()) == num_vars_) {
        result.status = SolveResult::Status::kSat;
        result.model.resize(num_vars_);
        for (int v = 0; v < num_vars_; ++v) result.model[v] = assigns_[v] > 0;
        result.stats = stats_;
        return result;
      }

      // Decide.
      const int var = pick_branch_var();
      ++stats_.decisions;
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      enqueue(2 * var + (phase_[var] ? 0 : 1), kInvalidRef);
    }
  }

 private:
  // ---- clause arena ----------------------------------------------------
  std::uint32_t alloc_clause(const std::vector<int>& lits, bool learnt,
                             std::uint32_t lbd) {
    const std::uint32_t ref = static_cast<std::uint32_t>(arena_.size());
    arena_.push_back((static_cast<std::uint32_t>(lits.size()) << 2) |
                     (learnt ? 2u : 0u));
    arena_.push_back(lbd);
    for (int l : lits) arena_.push_back(static_cast<std::uint32_t>(l));
    return ref;
  }
  std::uint32_t clause_size(std::uint32_t ref) const { return arena_[ref] >> 2; }
  bool clause_learnt(std::uint32_t ref) const { return arena_[ref] & 2u; }
  bool clause_deleted(std::uint32_t ref) const { return arena_[ref] & 1u; }
  void mark_deleted(std::uint32_t ref) { arena_[ref] |= 1u; }
  std::uint32_t clause_lbd(std::uint32_t ref) const { return arena_[ref + 1]; }
  int clause_lit(std::uint32_t ref, std::uint32_t i) const {
    return static_cast<int>(arena_[ref + 2 + i]);
  }
  void set_clause_lit(std::uint32_t ref, std::uint32_t i, int lit) {
    arena_[ref + 2 + i] = static_cast<std::uint32_t>(lit);
  }

  struct Watcher {
    std::uint32_t cref;
    int blocker;
  };

  // ---- assignment ------------------------------------------------------
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  // -1 false, 0 unassigned, +1 true
  int lit_value(int lit) const {
    const signed char a = assigns_[lit_var(lit)];
    if (a == 0) return 0;
    return lit_sign(lit) ? -a : a;
  }

  void enqueue(int lit, std::uint32_t reason_ref) {
    const int v = lit_var(lit);
    assert(assigns_[v] == 0);
    assigns_[v] = lit_sign(lit) ? -1 : 1;
    level_[v] = decision_level();
    reason_[v] = reason_ref;
    trail_.push_back(lit);
  }

  void cancel_until(int target_level) {
    if (decision_level() <= target_level) return;
    const int bound = trail_lim_[target_level];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i) {
      const int lit = trail_[i];
      const int v = lit_var(lit);
      phase_[v] = assigns_[v] > 0;  // phase saving
      assigns_[v] = 0;
      reason_[v] = kInvalidRef;
      order_.insert(v);
    }
    trail_.resize(bound);
    trail_lim_.resize(target_level);
    qhead_ = static_cast<std::size_t>(bound);
  }

  int pick_branch_var() {
    if (options_.random_var_freq > 0 &&
        static_cast<double>(rng_.next_u64()) / 18446744073709551616.0 <
            options_.random_var_freq &&
        !order_.raw().empty()) {
      const int v = order_.raw()[rng_.below(order_.raw().size())];
      if (assigns_[v] == 0) return v;
    }
    while (true) {
      assert(!order_.empty());
      const int v = order_.remove_max();
      if (assigns_[v] == 0) return v;
    }
  }

  void var_bump(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    order_.increased(v);
  }

  // ---- clause management -----------------------------------------------
  void attach(std::uint32_t ref) {
    const int l0 = clause_lit(ref, 0);
    const int l1 = clause_lit(ref, 1);
    watches_[l0].push_back({ref, l1});
    watches_[l1].push_back({ref, l0});
  }

  bool locked(std::uint32_t ref) const {
    const int first = clause_lit(ref, 0);
    return lit_value(first) == 1 && reason_[lit_var(first)] == ref;
  }

  // Normalizes a DIMACS clause to internal literals: validates ids, removes
  // duplicates; returns false for tautologies (clause can be dropped).
  bool normalize(const cnf::Clause& in, std::vector<int>& out) const {
    out.clear();
    for (int dimacs : in) {
      if (dimacs == 0 || std::abs(dimacs) > num_vars_) {
        throw MalformedClause("literal " + std::to_string(dimacs) +
                              " out of range (num_vars = " +
                              std::to_string(num_vars_) + ")");
      }
      out.push_back(make_lit(dimacs));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      if (out[i + 1] == lit_neg(out[i])) return false;  // tautology
    }
    return true;
  }

  // Level-0 clause loading. Returns false if the formula is already
  // unsatisfiable.
  bool add_input_clause(const cnf::Clause& clause) {
    if (clause.empty()) return false;
    std::vector<int> lits;
    if (!normalize(clause, lits)) return true;  // tautology: skip

    // Drop literals already false at level 0; satisfied clauses are skipped.
    std::vector<int> active;
    for (int lit : lits) {
      const int v = lit_value(lit);
      if (v == 1) return true;
      if (v == 0) active.push_back(lit);
    }
    if (active.empty()) return false;
    if (active.size() == 1) {
      enqueue(active[0], kInvalidRef);
      return propagate() == kInvalidRef;
    }
    const std::uint32_t ref = alloc_clause(active, false, 0);
    clauses_.push_back(ref);
    ++clauses_count_;
    attach(ref);
    return true;
  }

  // Clause injected by the callback at an arbitrary decision level. Kept
  // permanently. Returns false if the instance became unsatisfiable.
  bool add_external_clause(const cnf::Clause& clause) {
    if (clause.empty()) return false;
    std::vector<int> lits;
    if (!normalize(clause, lits)) return true;  // tautology: vacuous

    if (lits.size() == 1) {
      // A unit fact must persist across backtracking; ground it at level 0.
      cancel_until(0);
      const int v = lit_value(lits[0]);
      if (v == -1) return false;
      if (v == 0) {
        enqueue(lits[0], kInvalidRef);
        if (propagate() != kInvalidRef) return false;
      }
      return true;
    }

    // Watch the two literals assigned last (unassigned counts as latest) so
    // the watches stay valid after backjumps.
    auto rank = [&](int lit) {
      return lit_value(lit) == 0 ? std::numeric_limits<int>::max()
                                 : level_[lit_var(lit)];
    };
    std::stable_sort(lits.begin(), lits.end(), [&](int a, int b) {
      return rank(a) > rank(b);
    });
    const std::uint32_t ref = alloc_clause(lits, false, 0);
    permanents_.push_back(ref);
    attach(ref);

    int false_count = 0;
    for (int lit : lits) {
      if (lit_value(lit) == -1) ++false_count;
    }
    if (false_count == static_cast<int>(lits.size())) {
      // Falsified: treat like any conflict.
      const int conflict_level = level_[lit_var(lits[0])];
      if (conflict_level == 0) return false;
      cancel_until(conflict_level);
      ++stats_.conflicts;
      handle_conflict(ref);
      return true;
    }
    if (false_count == static_cast<int>(lits.size()) - 1 &&
        lit_value(lits[0]) == 0) {
      enqueue(lits[0], ref);
    }
    return true;
  }

  // ---- propagation -------------------------------------------------------
  std::uint32_t propagate() {
    std::uint32_t conflict = kInvalidRef;
    while (qhead_ < trail_.size()) {
      const int p = trail_[qhead_++];
      ++stats_.propagations;
      const int false_lit = lit_neg(p);
      std::vector<Watcher>& ws = watches_[false_lit];
      std::size_t i = 0, j = 0;
      const std::size_t end = ws.size();
      while (i != end) {
        const Watcher w = ws[i];
        if (lit_value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        const std::uint32_t cr = w.cref;
        ++i;
        // Ensure the false literal is at position 1.
        if (clause_lit(cr, 0) == false_lit) {
          set_clause_lit(cr, 0, clause_lit(cr, 1));
          set_clause_lit(cr, 1, false_lit);
        }
        const int first = clause_lit(cr, 0);
        if (first != w.blocker && lit_value(first) == 1) {
          ws[j++] = {cr, first};
          continue;
        }
        // Look for a new watch.
        const std::uint32_t size = clause_size(cr);
        bool found = false;
        for (std::uint32_t k = 2; k < size; ++k) {
          const int lk = clause_lit(cr, k);
          if (lit_value(lk) != -1) {
            set_clause_lit(cr, 1, lk);
            set_clause_lit(cr, k, false_lit);
            watches_[lk].push_back({cr, first});
            found = true;
            break;
          }
        }
        if (found) continue;
        // Unit or conflicting.
        ws[j++] = {cr, first};
        if (lit_value(first) == -1) {
          conflict = cr;
          qhead_ = trail_.size();
          while (i != end) ws[j++] = ws[i++];
        } else {
          enqueue(first, cr);
        }
      }
      ws.resize(j);
      if (conflict != kInvalidRef) break;
    }
    return conflict;
  }

  // ---- conflict analysis -------------------------------------------------
  void analyze(std::uint32_t confl, std::vector<int>& out_learnt,
               int& out_btlevel, std::uint32_t& out_lbd) {
    int path_count = 0;
    int p = -1;
    out_learnt.clear();
    out_learnt.push_back(-1);  // slot for the asserting literal
    std::size_t index = trail_.size();

    do {
      assert(confl != kInvalidRef);
      const std::uint32_t size = clause_size(confl);
      for (std::uint32_t j = (p == -1 ? 0 : 1); j < size; ++j) {
        const int q = clause_lit(confl, j);
        const int v = lit_var(q);
        if (!seen_[v] && level_[v] > 0) {
          var_bump(v);
          seen_[v] = 1;
          if (level_[v] >= decision_level()) {
            ++path_count;
          } else {
            out_learnt.push_back(q);
          }
        }
      }
      while (!seen_[lit_var(trail_[--index])]) {
      }
      p = trail_[index];
      confl = reason_[lit_var(p)];
      seen_[lit_var(p)] = 0;
      --path_count;
    } while (path_count > 0);
    out_learnt[0] = lit_neg(p);

    // Deep minimization (MiniSat ccmin mode 2).
    toclear_.assign(out_learnt.begin(), out_learnt.end());
    std::uint32_t abstract_levels = 0;
    for (std::size_t i = 1; i < out_learnt.size(); ++i) {
      abstract_levels |= 1u << (level_[lit_var(out_learnt[i])] & 31);
    }
    std::size_t kept = 1;
    for (std::size_t i = 1; i < out_learnt.size(); ++i) {
      const int v = lit_var(out_learnt[i]);
      if (reason_[v] == kInvalidRef || !lit_redundant(out_learnt[i], abstract_levels)) {
        out_learnt[kept++] = out_learnt[i];
      }
    }
    out_learnt.resize(kept);

    if (out_learnt.size() == 1) {
      out_btlevel = 0;
    } else {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < out_learnt.size(); ++i) {
        if (level_[lit_var(out_learnt[i])] > level_[lit_var(out_learnt[max_i])]) {
          max_i = i;
        }
      }
      std::swap(out_learnt[1], out_learnt[max_i]);
      out_btlevel = level_[lit_var(out_learnt[1])];
    }

    // LBD: number of distinct decision levels in the clause.
    ++lbd_counter_;
    out_lbd = 0;
    for (int lit : out_learnt) {
      const int lvl = level_[lit_var(lit)];
      if (lbd_stamp_[lvl] != lbd_counter_) {
        lbd_stamp_[lvl] = lbd_counter_;
        ++out_lbd;
      }
    }

    for (int lit : toclear_) seen_[lit_var(lit)] = 0;
  }

  bool lit_redundant(int lit, std::uint32_t abstract_levels) {
    stack_.clear();
    stack_.push_back(lit);
    const std::size_t top = toclear_.size();
    while (!stack_.empty()) {
      const int q = stack_.back();
      stack_.pop_back();
      const std::uint32_t c = reason_[lit_var(q)];
      assert(c != kInvalidRef);
      const std::uint32_t size = clause_size(c);
      for (std::uint32_t j = 1; j < size; ++j) {
        const int l = clause_lit(c, j);
        const int v = lit_var(l);
        if (!seen_[v] && level_[v] > 0) {
          if (reason_[v] != kInvalidRef &&
              ((1u << (level_[v] & 31)) & abstract_levels) != 0) {
            seen_[v] = 1;
            stack_.push_back(l);
            toclear_.push_back(l);
          } else {
            for (std::size_t i = top; i < toclear_.size(); ++i) {
              seen_[lit_var(toclear_[i])] = 0;
            }
            toclear_.resize(top);
            return false;
          }
        }
      }
    }
    return true;
  }

  void handle_conflict(std::uint32_t confl) {
    learnt_scratch_.clear();
    int backtrack_level = 0;
    std::uint32_t lbd = 0;
    analyze(confl, learnt_scratch_, backtrack_level, lbd);
    cancel_until(backtrack_level);
    if (learnt_scratch_.size() == 1) {
      enqueue(learnt_scratch_[0], kInvalidRef);
    } else {
      const std::uint32_t ref = alloc_clause(learnt_scratch_, true, lbd);
      learnts_.push_back(ref);
      attach(ref);
      enqueue(learnt_scratch_[0], ref);
    }
    ++stats_.learned_clauses;
    var_inc_ /= options_.var_decay;
  }

  // ---- learned clause reduction ------------------------------------------
  void reduce_db() {
    // Worst first: high LBD, then long, then young.
    std::sort(learnts_.begin(), learnts_.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::make_tuple(clause_lbd(a), clause_size(a), a) >
             std::make_tuple(clause_lbd(b), clause_size(b), b);
    });
    const std::size_t target = learnts_.size() / 2;
    std::size_t removed = 0;
    for (std::size_t i = 0; i < learnts_.size() && removed < target; ++i) {
      const std::uint32_t c = learnts_[i];
      if (clause_size(c) > 2 && clause_lbd(c) > 3 && !locked(c)) {
        mark_deleted(c);
        ++removed;
      }
    }
    learnts_.erase(std::remove_if(learnts_.begin(), learnts_.end(),
                                  [&](std::uint32_t c) { return clause_deleted(c); }),
                   learnts_.end());
    garbage_collect();
  }

  void garbage_collect() {
    std::vector<std::uint32_t> fresh;
    fresh.reserve(arena_.size());
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    auto move_clause = [&](std::uint32_t ref) {
      const std::uint32_t new_ref = static_cast<std::uint32_t>(fresh.size());
      const std::uint32_t words = 2 + clause_size(ref);
      for (std::uint32_t w = 0; w < words; ++w) fresh.push_back(arena_[ref + w]);
      remap.emplace(ref, new_ref);
      return new_ref;
    };
    for (auto& ref : clauses_) ref = move_clause(ref);
    for (auto& ref : permanents_) ref = move_clause(ref);
    for (auto& ref : learnts_) ref = move_clause(ref);
    arena_ = std::move(fresh);
    for (int lit : trail_) {
      auto& r = reason_[lit_var(lit)];
      if (r != kInvalidRef) {
        const auto it = remap.find(r);
        assert(it != remap.end());
        r = it->second;
      }
    }
    for (auto& ws : watches_) ws.clear();
    for (std::uint32_t ref : clauses_) attach(ref);
    for (std::uint32_t ref : permanents_) attach(ref);
    for (std::uint32_t ref : learnts_) attach(ref);
  }

  // ---- data ----------------------------------------------------------------
  SolverOptions options_;
  const Callback* callback_;
  Rng rng_;
  bool ok_ = true;
  int num_vars_ = 0;

  std::vector<std::uint32_t> arena_;
  std::vector<std::uint32_t> clauses_;     // input clauses
  std::vector<std::uint32_t> permanents_;  // callback clauses, never removed
  std::vector<std::uint32_t> learnts_;
  std::size_t clauses_count_ = 0;

  std::vector<signed char> assigns_;
  std::vector<signed char> phase_;
  std::vector<int> level_;
  std::vector<std::uint32_t> reason_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<std::vector<Watcher>> watches_;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  VarOrderHeap order_{activity_};

  std::vector<signed char> seen_;
  std::vector<int> toclear_;
  std::vector<int> stack_;
  std::vector<int> learnt_scratch_;
  std::vector<std::uint64_t> lbd_stamp_;
  std::uint64_t lbd_counter_ = 0;

  SolverStats stats_;
};

}  // namespace

SolveResult solve(const cnf::CnfFormula& formula, const Callback* callback,
                  const SolverOptions& options) {
  Solver solver(formula, callback, options);
  return solver.run();
}

bool check_model(const cnf::CnfFormula& formula, const std::vector<bool>& model) {
  if (static_cast<int>(model.size()) < formula.num_vars) return false;
  for (const cnf::Clause& clause : formula.clauses) {
    bool satisfied = false;
    for (int lit : clause) {
      const int v = std::abs(lit) - 1;
      if (v < 0 || v >= formula.num_vars) return false;
      if (model[v] == (lit > 0)) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) return false;
  }
  return true;
}

}  // namespace copperbolt::sat
