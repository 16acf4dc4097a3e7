#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "copperbolt/lattice.hpp"
#include "copperbolt/util.hpp"

namespace copperbolt::cs {

struct BoundTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Known high bits of p: p = p_hat + x0 with |x0| <= X.
struct MsbProblem {
  Int N;      // semiprime to factor
  Int p_hat;  // known-high-bits value, low bits zeroed
  Int X;      // bound on the unknown low part
};

// Known m low bits of p: p = 2^m * x0 + p_check.
struct LsbProblem {
  Int N;            // odd semiprime
  std::size_t m;    // number of known low bits
  Int p_check;      // their value; odd, < 2^m
};

struct Factors {
  Int p, q;  // p * q == N, 1 < p <= q < N
};

struct OracleOutcome {
  std::optional<Factors> factors;
  long roots_tried = 0;

  bool found() const { return factors.has_value(); }
};

// 4x4 basis for the polynomials {N, f, x f, x^2 f} with f = x + p_hat, column
// j scaled by X^j. Lower triangular with diagonal (N, X, X^2, X^3).
lattice::LatticeBasis build_msb_basis(const MsbProblem& prob);

struct LsbBasis {
  lattice::LatticeBasis basis;  // 5x5, diagonal (N^2, N X, X^2, X^3, X^4)
  Int X;                        // floor(N^(1/5) / 4)
  Int c;                        // 2^-m * p_check mod N
};

// Basis for {N^2, N f, f^2, x f^2, x^2 f^2} with f = x + c. Throws
// BoundTooSmall when X would be zero (N below ~2^10).
LsbBasis build_lsb_basis(const LsbProblem& prob);

// LLL-reduce, convert the first `rows_to_search` rows back to polynomials and
// return their integer roots within |x| <= X (deduplicated, ascending).
std::vector<Int> small_roots(const lattice::LatticeBasis& basis, const Int& X,
                             int rows_to_search = 1);

// For each root x0, check whether gcd(p_hat + x0, N) is nontrivial.
OracleOutcome recover_factor_msb(const MsbProblem& prob);

// For each root x0 >= 0, check whether 2^m x0 + p_check divides N. When the
// true p has p == p_check (mod 2^m) and (p - p_check)/2^m <= X, the root is
// guaranteed to be present, so a NoFactorFound outcome certifies that no such
// factor exists.
OracleOutcome recover_factor_lsb(const LsbProblem& prob);

}  // namespace copperbolt::cs
