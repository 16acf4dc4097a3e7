#include "copperbolt/polyint.hpp"

#include <algorithm>
#include <cassert>

namespace copperbolt::poly {

namespace {

void trim(std::vector<Int>& coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
}

}  // namespace

IntPoly::IntPoly(std::vector<Int> coeffs) : coeffs_(std::move(coeffs)) {
  trim(coeffs_);
}

IntPoly::IntPoly(std::initializer_list<Int> coeffs) : coeffs_(coeffs) {
  trim(coeffs_);
}

IntPoly IntPoly::constant(Int c) {
  return IntPoly(std::vector<Int>{std::move(c)});
}

IntPoly IntPoly::x_plus(Int c) {
  return IntPoly(std::vector<Int>{std::move(c), 1});
}

const Int& IntPoly::coeff(std::size_t i) const {
  static const Int zero = 0;
  return i < coeffs_.size() ? coeffs_[i] : zero;
}

Int eval_at(const IntPoly& p, const Int& x) {
  Int acc = 0;
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

IntPoly multiply(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<Int> out(a.coeffs().size() + b.coeffs().size() - 1, Int(0));
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs().size(); ++j) {
      out[i + j] += a.coeffs()[i] * b.coeffs()[j];
    }
  }
  return IntPoly(std::move(out));
}

IntPoly derivative(const IntPoly& p) {
  if (p.degree() < 1) return IntPoly();
  std::vector<Int> out(p.coeffs().size() - 1);
  for (std::size_t i = 1; i < p.coeffs().size(); ++i) {
    out[i - 1] = p.coeffs()[i] * static_cast<unsigned long>(i);
  }
  return IntPoly(std::move(out));
}

namespace {

// Rational-coefficient scratch polynomials for the root-isolation machinery.
using QPoly = std::vector<mpq_class>;

QPoly to_q(const IntPoly& p) {
  QPoly q(p.coeffs().size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = p.coeffs()[i];
  return q;
}

void q_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly q_derivative(const QPoly& p) {
  if (p.size() < 2) return {};
  QPoly out(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) {
    out[i - 1] = p[i] * mpq_class(static_cast<unsigned long>(i));
  }
  return out;
}

mpq_class q_eval(const QPoly& p, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Remainder of a by b over Q; b nonzero.
QPoly q_rem(QPoly a, const QPoly& b) {
  assert(!b.empty());
  while (a.size() >= b.size() && !a.empty()) {
    const mpq_class factor = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[i + shift] -= factor * b[i];
    }
    a.pop_back();
    q_trim(a);
  }
  return a;
}

// Scale by a positive rational so coefficients are coprime integers. Positive
// scaling preserves the sign pattern, which is all the Sturm chain needs.
QPoly q_primitive(QPoly p) {
  q_trim(p);
  if (p.empty()) return p;
  Int num_gcd = 0, den_lcm = 1;
  for (const auto& c : p) {
    num_gcd = [&] {
      Int g;
      mpz_gcd(g.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
      return g;
    }();
    Int l;
    mpz_lcm(l.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
    den_lcm = l;
  }
  mpq_class scale(den_lcm, num_gcd);
  scale.canonicalize();
  for (auto& c : p) c *= scale;
  return p;
}

// Sturm chain of a square-free polynomial: s0, s1 = s0', then negated
// remainders, each reduced to primitive integer form.
std::vector<QPoly> sturm_chain(const QPoly& sf) {
  std::vector<QPoly> chain;
  chain.push_back(q_primitive(sf));
  QPoly d = q_derivative(sf);
  q_trim(d);
  if (d.empty()) return chain;
  chain.push_back(q_primitive(d));
  while (true) {
    QPoly r = q_rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    chain.push_back(q_primitive(std::move(r)));
  }
  return chain;
}

int sign_of(const mpq_class& v) { return mpq_sgn(v.get_mpq_t()); }

// Sign variations in the chain at x, zeros skipped. Valid Sturm count
// endpoint only when chain[0](x) != 0.
int variations_at(const std::vector<QPoly>& chain, const mpq_class& x) {
  int count = 0, prev = 0;
  for (const auto& member : chain) {
    const int s = sign_of(q_eval(member, x));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

// Number of integers in the open interval (lo, hi). floor(lo)+1 is the
// smallest integer > lo and ceil(hi)-1 the largest integer < hi, whether or
// not the endpoints are integral.
Int integers_inside(const mpq_class& lo, const mpq_class& hi) {
  Int first, last;
  mpz_fdiv_q(first.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
  first += 1;
  mpz_cdiv_q(last.get_mpz_t(), hi.get_num().get_mpz_t(), hi.get_den().get_mpz_t());
  last -= 1;
  if (last < first) return 0;
  return last - first + 1;
}

Int sole_integer_inside(const mpq_class& lo) {
  Int first;
  mpz_fdiv_q(first.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
  return first + 1;
}

struct Isolator {
  const std::vector<QPoly>& chain;
  const IntPoly& original;
  const Int& bound;
  std::vector<Int> found;

  const QPoly& sf() const { return chain.front(); }

  // A split point strictly between the largest integer <= mid_floor and the
  // next one, avoiding roots of the square-free part. At most deg(sf) points
  // can be roots, so the perturbation loop terminates.
  mpq_class non_root_between(const Int& m) {
    mpq_class c(2 * m + 1, 2);  // m + 1/2
    mpq_class step(1, 4);
    while (sign_of(q_eval(sf(), c)) == 0) {
      c += step;
      step /= 2;
    }
    return c;
  }

  void maybe_record(const Int& r) {
    if (r < -bound || r > bound) return;
    if (eval_at(original, r) == 0) found.push_back(r);
  }

  // lo < hi, neither a root of sf. Records all integer roots inside (lo, hi).
  void isolate(const mpq_class& lo, const mpq_class& hi, int var_lo, int var_hi) {
    if (var_lo - var_hi <= 0) return;
    const Int inside = integers_inside(lo, hi);
    if (inside == 0) return;
    if (inside == 1) {
      maybe_record(sole_integer_inside(lo));
      return;
    }
    // Split between the two middle integers.
    Int first;
    mpz_fdiv_q(first.get_mpz_t(), lo.get_num().get_mpz_t(), lo.get_den().get_mpz_t());
    first += 1;
    const Int m = first + (inside - 1) / 2;
    const mpq_class c = non_root_between(m);
    const int var_c = variations_at(chain, c);
    isolate(lo, c, var_lo, var_c);
    isolate(c, hi, var_c, var_hi);
  }
};

}  // namespace

std::vector<Int> integer_roots(const IntPoly& p, const Int& bound) {
  if (p.is_zero()) throw std::invalid_argument("integer_roots: zero polynomial");
  if (bound < 0) return {};
  if (p.degree() == 0) return {};

  // Square-free part p / gcd(p, p'), computed over Q.
  QPoly a = q_primitive(to_q(p));
  QPoly b = q_primitive(q_derivative(a));
  while (!b.empty()) {
    QPoly r = q_rem(a, b);
    a = std::move(b);
    b = q_primitive(std::move(r));
  }
  // a is now gcd(p, p') up to a constant; divide it out.
  QPoly sf = to_q(p);
  if (a.size() > 1) {
    QPoly quotient(sf.size() - a.size() + 1, mpq_class(0));
    QPoly rem = to_q(p);
    while (rem.size() >= a.size() && !rem.empty()) {
      const mpq_class factor = rem.back() / a.back();
      const std::size_t shift = rem.size() - a.size();
      quotient[shift] = factor;
      for (std::size_t i = 0; i < a.size(); ++i) rem[i + shift] -= factor * a[i];
      rem.pop_back();
      q_trim(rem);
    }
    assert(rem.empty());
    sf = std::move(quotient);
  }

  const std::vector<QPoly> chain = sturm_chain(q_primitive(std::move(sf)));

  Isolator iso{chain, p, bound, {}};
  // Start on half-integers just outside [-bound, bound]; perturb outward if
  // either happens to be a root of the square-free part.
  mpq_class lo = mpq_class(-2 * bound - 1, 2);
  mpq_class step(1, 4);
  while (sign_of(q_eval(chain.front(), lo)) == 0) {
    lo -= step;
    step /= 2;
  }
  mpq_class hi = mpq_class(2 * bound + 1, 2);
  step = mpq_class(1, 4);
  while (sign_of(q_eval(chain.front(), hi)) == 0) {
    hi += step;
    step /= 2;
  }
  iso.isolate(lo, hi, variations_at(chain, lo), variations_at(chain, hi));

  std::sort(iso.found.begin(), iso.found.end());
  iso.found.erase(std::unique(iso.found.begin(), iso.found.end()), iso.found.end());
  return iso.found;
}

IntPoly row_to_poly(const std::vector<Int>& row, const Int& X) {
  std::vector<Int> coeffs(row.size());
  Int scale = 1;
  for (std::size_t i = 0; i < row.size(); ++i) {
    Int q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), row[i].get_mpz_t(), scale.get_mpz_t());
    if (r != 0) {
      throw DivisibilityViolation("row entry " + std::to_string(i) +
                                  " not divisible by X^i");
    }
    coeffs[i] = q;
    scale *= X;
  }
  return IntPoly(std::move(coeffs));
}

std::vector<Int> poly_to_row(const IntPoly& p, const Int& X, std::size_t width) {
  if (p.coeffs().size() > width) {
    throw std::invalid_argument("poly_to_row: degree too large for width");
  }
  std::vector<Int> row(width, Int(0));
  Int scale = 1;
  for (std::size_t i = 0; i < width; ++i) {
    if (i < p.coeffs().size()) row[i] = p.coeffs()[i] * scale;
    scale *= X;
  }
  return row;
}

}  // namespace copperbolt::poly
