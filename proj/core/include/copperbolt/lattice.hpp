#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "copperbolt/util.hpp"

namespace copperbolt::lattice {

struct SingularBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Square integer basis; each row is one basis vector. delta is the Lovász
// parameter, 1/4 < delta < 1.
struct LatticeBasis {
  std::vector<std::vector<Int>> rows;
  mpq_class delta = mpq_class(99, 100);
};

struct ReductionCheck {
  bool size_reduced = true;
  bool lovasz = true;
  std::string detail;  // first violation, when any

  bool ok() const { return size_reduced && lovasz; }
  explicit operator bool() const { return ok(); }
};

// Textbook LLL with exact rational Gram-Schmidt. The output spans the same
// lattice, is size-reduced (|mu_ij| <= 1/2) and satisfies the Lovász
// condition with basis.delta. Deterministic. Throws SingularBasis on linearly
// dependent rows.
LatticeBasis lll_reduce(const LatticeBasis& basis);

// Independent checker: recomputes the Gram-Schmidt data from scratch with
// exact rationals and verifies both LLL conditions against basis.delta.
ReductionCheck is_lll_reduced(const LatticeBasis& basis);

// Exact determinant via Bareiss fraction-free elimination.
Int exact_determinant(const LatticeBasis& basis);

}  // namespace copperbolt::lattice
