#pragma once

#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "copperbolt/util.hpp"

namespace copperbolt::poly {

struct DivisibilityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense univariate polynomial over Z. coeffs[i] is the coefficient of x^i;
// the zero polynomial has an empty coefficient list, otherwise the leading
// coefficient is nonzero.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<Int> coeffs);
  IntPoly(std::initializer_list<Int> coeffs);

  static IntPoly constant(Int c);
  // x^1 with coefficient 1 plus constant term c, i.e. x + c.
  static IntPoly x_plus(Int c);

  bool is_zero() const { return coeffs_.empty(); }
  // Degree of the zero polynomial is -1 by convention.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Int>& coeffs() const { return coeffs_; }
  const Int& coeff(std::size_t i) const;

  bool operator==(const IntPoly& other) const = default;

 private:
  std::vector<Int> coeffs_;
};

// Exact evaluation by Horner's rule.
Int eval_at(const IntPoly& p, const Int& x);

IntPoly multiply(const IntPoly& a, const IntPoly& b);

IntPoly derivative(const IntPoly& p);

// All integers r with p(r) == 0 and |r| <= bound, sorted ascending, no
// duplicates. Exact arithmetic throughout: the square-free part of p is
// bisected over [-bound, bound] with Sturm-sequence root counts, and every
// candidate is confirmed by evaluating p itself. p must be nonzero.
std::vector<Int> integer_roots(const IntPoly& p, const Int& bound);

// Coefficient i = row[i] / X^i. Throws DivisibilityViolation when X^i does
// not divide row[i], which signals a lattice-construction bug upstream.
IntPoly row_to_poly(const std::vector<Int>& row, const Int& X);

// Entry i = coeff_i * X^i, zero-padded to `width`; requires deg p < width.
std::vector<Int> poly_to_row(const IntPoly& p, const Int& X, std::size_t width);

}  // namespace copperbolt::poly
