#include "copperbolt/lattice.hpp"

#include <cassert>
#include <utility>

namespace copperbolt::lattice {

namespace {

void check_shape(const LatticeBasis& basis) {
  const std::size_t n = basis.rows.size();
  if (n == 0) throw std::invalid_argument("empty basis");
  for (const auto& row : basis.rows) {
    if (row.size() != n) throw std::invalid_argument("basis must be square");
  }
  if (basis.delta <= mpq_class(1, 4) || basis.delta >= 1) {
    throw std::invalid_argument("delta must satisfy 1/4 < delta < 1");
  }
}

mpq_class dot_zq(const std::vector<Int>& a, const std::vector<mpq_class>& b) {
  mpq_class acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += mpq_class(a[i]) * b[i];
  return acc;
}

struct GramSchmidt {
  // star[i] = b_i - sum_{j<i} mu[i][j] star[j]; norm2[i] = <star[i], star[i]>
  std::vector<std::vector<mpq_class>> star;
  std::vector<std::vector<mpq_class>> mu;
  std::vector<mpq_class> norm2;
};

GramSchmidt gram_schmidt(const std::vector<std::vector<Int>>& rows) {
  const std::size_t n = rows.size();
  GramSchmidt gs;
  gs.star.assign(n, std::vector<mpq_class>(n, mpq_class(0)));
  gs.mu.assign(n, std::vector<mpq_class>(n, mpq_class(0)));
  gs.norm2.assign(n, mpq_class(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < n; ++c) gs.star[i][c] = mpq_class(rows[i][c]);
    for (std::size_t j = 0; j < i; ++j) {
      if (gs.norm2[j] == 0) throw SingularBasis("dependent rows in basis");
      gs.mu[i][j] = dot_zq(rows[i], gs.star[j]) / gs.norm2[j];
      for (std::size_t c = 0; c < n; ++c) {
        gs.star[i][c] -= gs.mu[i][j] * gs.star[j][c];
      }
    }
    for (std::size_t c = 0; c < n; ++c) gs.norm2[i] += gs.star[i][c] * gs.star[i][c];
    if (gs.norm2[i] == 0) throw SingularBasis("dependent rows in basis");
  }
  return gs;
}

}  // namespace

// All-integer LLL state: the Gram-Schmidt rationals are carried as integer
// numerator/denominator pairs, mu[i][j] = lambda[i][j] / d[j+1] and
// |b*_i|^2 = d[i+1] / d[i] with d[i] the Gram determinant of the first i
// rows. Avoids rational-number normalization in the hot loop while staying
// exact.
class IntegralLll {
 public:
  IntegralLll(std::vector<std::vector<Int>> rows, const mpq_class& delta)
      : rows_(std::move(rows)),
        n_(rows_.size()),
        delta_num_(delta.get_num()),
        delta_den_(delta.get_den()) {
    d_.assign(n_ + 1, Int(0));
    d_[0] = 1;
    lambda_.assign(n_, std::vector<Int>(n_, Int(0)));
  }

  std::vector<std::vector<Int>> run() {
    if (n_ == 1) {
      compute_gram_row(0);
      return std::move(rows_);
    }
    compute_gram_row(0);
    std::size_t k = 1;
    std::size_t k_max = 0;
    while (k < n_) {
      if (k > k_max) {
        k_max = k;
        compute_gram_row(k);
      }
      size_reduce(k, k - 1);
      // Lovász: d[k+1]*d[k-1] >= delta*d[k]^2 - lambda^2, cleared of
      // denominators by delta_den.
      const Int& lam = lambda_[k][k - 1];
      if (delta_den_ * d_[k + 1] * d_[k - 1] <
          delta_num_ * d_[k] * d_[k] - delta_den_ * lam * lam) {
        swap_rows(k, k_max);
        k = k > 1 ? k - 1 : 1;
      } else {
        for (std::size_t l = k - 1; l-- > 0;) size_reduce(k, l);
        ++k;
      }
    }
    return std::move(rows_);
  }

 private:
  Int dot(const std::vector<Int>& a, const std::vector<Int>& b) const {
    Int acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
  }

  // Fill lambda_[k][0..k-1] and d_[k+1] from the inner products of row k.
  void compute_gram_row(std::size_t k) {
    for (std::size_t j = 0; j <= k; ++j) {
      Int u = dot(rows_[k], rows_[j]);
      for (std::size_t i = 0; i < j; ++i) {
        u = (d_[i + 1] * u - lambda_[k][i] * lambda_[j][i]) / d_[i];
      }
      if (j < k) {
        lambda_[k][j] = u;
      } else {
        if (u <= 0) throw SingularBasis("dependent rows in basis");
        d_[k + 1] = u;
      }
    }
  }

  void size_reduce(std::size_t k, std::size_t l) {
    // |mu| > 1/2 <=> |2 lambda| > d
    if (2 * abs(lambda_[k][l]) <= d_[l + 1]) return;
    // round(lambda/d), ties toward +infinity
    Int q;
    const Int num = 2 * lambda_[k][l] + d_[l + 1];
    const Int den = 2 * d_[l + 1];
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (std::size_t c = 0; c < n_; ++c) rows_[k][c] -= q * rows_[l][c];
    lambda_[k][l] -= q * d_[l + 1];
    for (std::size_t i = 0; i < l; ++i) lambda_[k][i] -= q * lambda_[l][i];
  }

  void swap_rows(std::size_t k, std::size_t k_max) {
    std::swap(rows_[k], rows_[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) {
      std::swap(lambda_[k][j], lambda_[k - 1][j]);
    }
    const Int lam = lambda_[k][k - 1];
    const Int b = (d_[k - 1] * d_[k + 1] + lam * lam) / d_[k];
    for (std::size_t i = k + 1; i <= k_max; ++i) {
      const Int t = lambda_[i][k];
      lambda_[i][k] = (d_[k + 1] * lambda_[i][k - 1] - lam * t) / d_[k];
      lambda_[i][k - 1] = (b * t + lam * lambda_[i][k]) / d_[k + 1];
    }
    d_[k] = b;
  }

  std::vector<std::vector<Int>> rows_;
  std::size_t n_;
  Int delta_num_, delta_den_;
  std::vector<Int> d_;
  std::vector<std::vector<Int>> lambda_;
};

LatticeBasis lll_reduce(const LatticeBasis& basis) {
  check_shape(basis);
  LatticeBasis out;
  out.rows = IntegralLll(basis.rows, basis.delta).run();
  out.delta = basis.delta;
  return out;
}

ReductionCheck is_lll_reduced(const LatticeBasis& basis) {
  check_shape(basis);
  const GramSchmidt gs = gram_schmidt(basis.rows);
  const std::size_t n = basis.rows.size();
  const mpq_class half(1, 2);
  ReductionCheck check;
  for (std::size_t i = 1; i < n && check.size_reduced; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (abs(gs.mu[i][j]) > half) {
        check.size_reduced = false;
        check.detail = "size reduction fails at mu[" + std::to_string(i) + "][" +
                       std::to_string(j) + "]";
        break;
      }
    }
  }
  for (std::size_t k = 1; k < n && check.lovasz; ++k) {
    const mpq_class rhs =
        (basis.delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.norm2[k - 1];
    if (gs.norm2[k] < rhs) {
      check.lovasz = false;
      check.detail = "Lovász condition fails at row " + std::to_string(k);
    }
  }
  return check;
}

Int exact_determinant(const LatticeBasis& basis) {
  const std::size_t n = basis.rows.size();
  if (n == 0) throw std::invalid_argument("empty basis");
  for (const auto& row : basis.rows) {
    if (row.size() != n) throw std::invalid_argument("basis must be square");
  }
  std::vector<std::vector<Int>> m = basis.rows;
  int sign = 1;
  Int prev = 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (m[i][i] == 0) {
      std::size_t pivot = i + 1;
      while (pivot < n && m[pivot][i] == 0) ++pivot;
      if (pivot == n) return 0;
      std::swap(m[i], m[pivot]);
      sign = -sign;
    }
    for (std::size_t r = i + 1; r < n; ++r) {
      for (std::size_t c = i + 1; c < n; ++c) {
        Int t = m[r][c] * m[i][i] - m[r][i] * m[i][c];
        mpz_divexact(m[r][c].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[r][i] = 0;
    }
    prev = m[i][i];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace copperbolt::lattice
