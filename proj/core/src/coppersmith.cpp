#include "copperbolt/coppersmith.hpp"

#include <algorithm>

#include "copperbolt/numtheory.hpp"
#include "copperbolt/polyint.hpp"

namespace copperbolt::cs {

using poly::IntPoly;

lattice::LatticeBasis build_msb_basis(const MsbProblem& prob) {
  if (prob.p_hat <= 0 || prob.p_hat >= prob.N || prob.X < 1) {
    throw std::invalid_argument("build_msb_basis: need 0 < p_hat < N, X >= 1");
  }
  const IntPoly f = IntPoly::x_plus(prob.p_hat);
  const IntPoly x({0, 1});
  lattice::LatticeBasis basis;
  basis.rows.push_back(poly::poly_to_row(IntPoly::constant(prob.N), prob.X, 4));
  basis.rows.push_back(poly::poly_to_row(f, prob.X, 4));
  basis.rows.push_back(poly::poly_to_row(poly::multiply(x, f), prob.X, 4));
  basis.rows.push_back(
      poly::poly_to_row(poly::multiply(poly::multiply(x, x), f), prob.X, 4));
  return basis;
}

LsbBasis build_lsb_basis(const LsbProblem& prob) {
  if (prob.N % 2 == 0) throw std::invalid_argument("build_lsb_basis: N must be odd");
  if (prob.p_check % 2 == 0 || prob.p_check < 0 ||
      bit_length(prob.p_check) > prob.m) {
    throw std::invalid_argument("build_lsb_basis: p_check must be odd and < 2^m");
  }
  LsbBasis out;
  out.X = nt::inth_root(prob.N, 5) / 4;
  if (out.X == 0) {
    throw BoundTooSmall("root bound X is zero for N = " + prob.N.get_str());
  }
  const Int pow2m = Int(1) << prob.m;
  out.c = nt::mod_inverse(pow2m, prob.N) * prob.p_check % prob.N;

  const IntPoly f = IntPoly::x_plus(out.c);
  const IntPoly f2 = poly::multiply(f, f);
  const IntPoly x({0, 1});
  auto scaled_n = [&](const IntPoly& p, const Int& factor) {
    std::vector<Int> coeffs = p.coeffs();
    for (auto& coeff : coeffs) coeff *= factor;
    return IntPoly(std::move(coeffs));
  };
  out.basis.rows.push_back(
      poly::poly_to_row(IntPoly::constant(prob.N * prob.N), out.X, 5));
  out.basis.rows.push_back(poly::poly_to_row(scaled_n(f, prob.N), out.X, 5));
  out.basis.rows.push_back(poly::poly_to_row(f2, out.X, 5));
  out.basis.rows.push_back(poly::poly_to_row(poly::multiply(x, f2), out.X, 5));
  out.basis.rows.push_back(
      poly::poly_to_row(poly::multiply(poly::multiply(x, x), f2), out.X, 5));
  return out;
}

std::vector<Int> small_roots(const lattice::LatticeBasis& basis, const Int& X,
                             int rows_to_search) {
  const lattice::LatticeBasis reduced = lll_reduce(basis);
  std::vector<Int> roots;
  const int limit = std::min<int>(rows_to_search, static_cast<int>(reduced.rows.size()));
  for (int i = 0; i < limit; ++i) {
    const IntPoly p = poly::row_to_poly(reduced.rows[i], X);
    if (p.is_zero()) continue;
    for (auto& r : poly::integer_roots(p, X)) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

namespace {

OracleOutcome outcome_from_divisor(const Int& N, const Int& divisor, long tried) {
  Int p = divisor;
  Int q = N / divisor;
  if (p > q) std::swap(p, q);
  return OracleOutcome{Factors{std::move(p), std::move(q)}, tried};
}

}  // namespace

OracleOutcome recover_factor_msb(const MsbProblem& prob) {
  const auto roots = small_roots(build_msb_basis(prob), prob.X);
  long tried = 0;
  for (const Int& x0 : roots) {
    ++tried;
    const Int g = nt::gcd(prob.p_hat + x0, prob.N);
    if (g > 1 && g < prob.N) return outcome_from_divisor(prob.N, g, tried);
  }
  return OracleOutcome{std::nullopt, tried};
}

OracleOutcome recover_factor_lsb(const LsbProblem& prob) {
  const LsbBasis built = build_lsb_basis(prob);
  const auto roots = small_roots(built.basis, built.X);
  long tried = 0;
  for (const Int& x0 : roots) {
    if (x0 < 0) continue;  // p_hat >= 0 by construction
    ++tried;
    const Int candidate = (Int(1) << prob.m) * x0 + prob.p_check;
    if (candidate > 1 && candidate < prob.N && prob.N % candidate == 0) {
      return outcome_from_divisor(prob.N, candidate, tried);
    }
  }
  return OracleOutcome{std::nullopt, tried};
}

}  // namespace copperbolt::cs
