#include "latrec/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace latrec {

LatticeBasis::LatticeBasis(std::vector<IntVector> columns) : columns_(std::move(columns)) {
  const std::size_t d = columns_.size();
  if (d == 0) throw std::invalid_argument("lattice basis must have dimension >= 1");
  for (const auto& c : columns_) {
    if (c.size() != d) throw std::invalid_argument("lattice basis must be square");
  }
  if (determinant(columns_) == 0) throw std::invalid_argument("lattice basis is singular");
}

BigInt determinant(const std::vector<IntVector>& columns) {
  const std::size_t d = columns.size();
  if (d == 0) return 1;
  // Bareiss fraction-free elimination; works on the transpose, same determinant.
  std::vector<IntVector> a = columns;
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < d && a[r][k] == 0) ++r;
      if (r == d) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < d; ++i) {
      for (std::size_t j = k + 1; j < d; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
    }
    prev = a[k][k];
  }
  return sign * a[d - 1][d - 1];
}

BigInt dot(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return s;
}

BigInt norm_sq(const IntVector& v) { return dot(v, v); }

namespace {

// Cohen, integral LLL. Indices are 1-based for b, lambda and d; d[0] = 1.
class IntegralLll {
 public:
  IntegralLll(std::vector<IntVector> b, const Rational& delta)
      : n_(b.size()), b_(std::move(b)), a_(delta.get_num()), c_(delta.get_den()), d_(n_ + 1), lam_(n_ + 1) {
    for (auto& row : lam_) row.resize(n_ + 1);
  }

  std::vector<IntVector> run() {
    if (n_ == 1) return std::move(b_);
    d_[0] = 1;
    d_[1] = dot(col(1), col(1));
    std::size_t k = 2;
    std::size_t kmax = 1;
    while (k <= n_) {
      if (k > kmax) {
        kmax = k;
        gram_schmidt_row(k);
      }
      while (true) {
        reduce(k, k - 1);
        // Lovasz with delta = a/c, scaled by d_{k-1}^2 * c.
        t1_ = d_[k] * d_[k - 2];
        mpz_addmul(t1_.get_mpz_t(), lam_[k][k - 1].get_mpz_t(), lam_[k][k - 1].get_mpz_t());
        t1_ *= c_;
        t2_ = d_[k - 1] * d_[k - 1];
        t2_ *= a_;
        if (t1_ < t2_) {
          swap(k, kmax);
          if (k > 2) --k;
        } else {
          break;
        }
      }
      for (std::size_t l = k - 1; l-- > 1;) reduce(k, l);
      ++k;
    }
    return std::move(b_);
  }

 private:
  IntVector& col(std::size_t i) { return b_[i - 1]; }

  void gram_schmidt_row(std::size_t k) {
    for (std::size_t j = 1; j <= k; ++j) {
      BigInt u = dot(col(k), col(j));
      for (std::size_t i = 1; i < j; ++i) {
        u *= d_[i];
        mpz_submul(u.get_mpz_t(), lam_[k][i].get_mpz_t(), lam_[j][i].get_mpz_t());
        mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d_[i - 1].get_mpz_t());
      }
      if (j < k) {
        lam_[k][j] = std::move(u);
      } else {
        if (u == 0) throw std::invalid_argument("lll_reduce: dependent basis vectors");
        d_[k] = std::move(u);
      }
    }
  }

  void reduce(std::size_t k, std::size_t l) {
    t1_ = 2 * abs(lam_[k][l]);
    if (t1_ <= d_[l]) return;
    // q = round(lambda / d_l), halves toward +inf.
    t1_ = 2 * lam_[k][l] + d_[l];
    t2_ = 2 * d_[l];
    mpz_fdiv_q(q_.get_mpz_t(), t1_.get_mpz_t(), t2_.get_mpz_t());
    IntVector& bk = col(k);
    const IntVector& bl = col(l);
    for (std::size_t r = 0; r < n_; ++r) mpz_submul(bk[r].get_mpz_t(), q_.get_mpz_t(), bl[r].get_mpz_t());
    mpz_submul(lam_[k][l].get_mpz_t(), q_.get_mpz_t(), d_[l].get_mpz_t());
    for (std::size_t i = 1; i < l; ++i) mpz_submul(lam_[k][i].get_mpz_t(), q_.get_mpz_t(), lam_[l][i].get_mpz_t());
  }

  void swap(std::size_t k, std::size_t kmax) {
    std::swap(b_[k - 1], b_[k - 2]);
    for (std::size_t j = 1; j + 2 <= k; ++j) std::swap(lam_[k][j], lam_[k - 1][j]);
    const BigInt lam = lam_[k][k - 1];
    BigInt big_b = d_[k - 2] * d_[k];
    mpz_addmul(big_b.get_mpz_t(), lam.get_mpz_t(), lam.get_mpz_t());
    mpz_divexact(big_b.get_mpz_t(), big_b.get_mpz_t(), d_[k - 1].get_mpz_t());
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      BigInt& lik = lam_[i][k];
      BigInt& lik1 = lam_[i][k - 1];
      t1_ = lik;  // t
      lik = d_[k] * lik1;
      mpz_submul(lik.get_mpz_t(), lam.get_mpz_t(), t1_.get_mpz_t());
      mpz_divexact(lik.get_mpz_t(), lik.get_mpz_t(), d_[k - 1].get_mpz_t());
      lik1 = big_b * t1_;
      mpz_addmul(lik1.get_mpz_t(), lam.get_mpz_t(), lik.get_mpz_t());
      mpz_divexact(lik1.get_mpz_t(), lik1.get_mpz_t(), d_[k].get_mpz_t());
    }
    d_[k - 1] = std::move(big_b);
  }

  std::size_t n_;
  std::vector<IntVector> b_;
  BigInt a_, c_;
  std::vector<BigInt> d_;
  std::vector<std::vector<BigInt>> lam_;
  BigInt t1_, t2_, q_;
};

}  // namespace

LatticeBasis lll_reduce(const LatticeBasis& basis, const Rational& delta) {
  if (!(delta > Rational(1, 4) && delta < 1)) throw std::invalid_argument("lll_reduce: delta must lie in (1/4, 1)");
  Rational dl(delta);
  dl.canonicalize();
  return LatticeBasis(IntegralLll(basis.columns(), dl).run(), LatticeBasis::Unchecked{});
}

BigInt default_coeff_bound(const LatticeBasis& basis) {
  const std::size_t d = basis.dimension();
  std::vector<BigInt> norms(d);
  BigInt min_norm;
  for (std::size_t j = 0; j < d; ++j) {
    norms[j] = norm_sq(basis.column(j));
    if (j == 0 || norms[j] < min_norm) min_norm = norms[j];
  }
  BigInt det = determinant(basis.columns());
  BigInt det_sq = det * det;
  BigInt best = 1;
  for (std::size_t i = 0; i < d; ++i) {
    BigInt num = min_norm;
    for (std::size_t j = 0; j < d; ++j) {
      if (j != i) num *= norms[j];
    }
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), det_sq.get_mpz_t());
    BigInt c = ceil_sqrt(q);
    if (c > best) best = c;
  }
  return best;
}

IntVector shortest_vector_bruteforce(const LatticeBasis& basis, std::optional<BigInt> coeff_bound) {
  const std::size_t d = basis.dimension();
  if (d > 8) throw std::invalid_argument("shortest_vector_bruteforce: dimension above 8 refused");
  const BigInt bound_big = coeff_bound ? *coeff_bound : default_coeff_bound(basis);
  if (bound_big < 1) throw std::invalid_argument("shortest_vector_bruteforce: coeff_bound must be positive");
  const long bound = bound_big.fits_slong_p() ? bound_big.get_si() : std::numeric_limits<long>::max() / 4;

  // Floating Gram-Schmidt for pruning only; candidates are compared exactly.
  using LD = long double;
  std::vector<std::vector<LD>> mu(d, std::vector<LD>(d, 0));
  std::vector<LD> bstar(d);
  {
    std::vector<std::vector<LD>> v(d, std::vector<LD>(d)), vs(d, std::vector<LD>(d));
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t r = 0; r < d; ++r) v[j][r] = static_cast<LD>(basis.column(j)[r].get_d());
    }
    for (std::size_t j = 0; j < d; ++j) {
      vs[j] = v[j];
      for (std::size_t i = 0; i < j; ++i) {
        LD num = 0;
        for (std::size_t r = 0; r < d; ++r) num += v[j][r] * vs[i][r];
        mu[j][i] = num / bstar[i];
        for (std::size_t r = 0; r < d; ++r) vs[j][r] -= mu[j][i] * vs[i][r];
      }
      LD s = 0;
      for (std::size_t r = 0; r < d; ++r) s += vs[j][r] * vs[j][r];
      bstar[j] = s;
    }
  }

  IntVector best;
  BigInt best_norm;
  for (std::size_t j = 0; j < d; ++j) {
    BigInt nrm = norm_sq(basis.column(j));
    if (best.empty() || nrm < best_norm) {
      best = basis.column(j);
      best_norm = nrm;
    }
  }
  constexpr LD slack = 1.0L + 1e-9L;

  std::vector<long> c(d, 0);
  std::vector<LD> partial(d + 1, 0);  // partial[j]: contribution of levels j..d-1
  IntVector vec(d);
  // Depth-first enumeration from the last coordinate down.
  auto recurse = [&](auto&& self, std::size_t level) -> void {
    LD center = 0;
    for (std::size_t i = level + 1; i < d; ++i) center -= mu[i][level] * static_cast<LD>(c[i]);
    const LD radius_sq = static_cast<LD>(best_norm.get_d()) * slack - partial[level + 1];
    if (radius_sq < 0) return;
    const LD r = std::sqrt(radius_sq / bstar[level]) + 1e-9L;
    LD lo_f = std::ceil(center - r), hi_f = std::floor(center + r);
    long lo = lo_f < -static_cast<LD>(bound) ? -bound : static_cast<long>(lo_f);
    long hi = hi_f > static_cast<LD>(bound) ? bound : static_cast<long>(hi_f);
    for (long x = lo; x <= hi; ++x) {
      c[level] = x;
      const LD t = static_cast<LD>(x) - center;
      partial[level] = partial[level + 1] + t * t * bstar[level];
      if (level > 0) {
        self(self, level - 1);
        continue;
      }
      bool zero = true;
      for (long ci : c) zero = zero && ci == 0;
      if (zero) continue;
      for (std::size_t r0 = 0; r0 < d; ++r0) {
        vec[r0] = 0;
        for (std::size_t j = 0; j < d; ++j) {
          if (c[j] != 0) vec[r0] += basis.column(j)[r0] * c[j];
        }
      }
      BigInt nrm = norm_sq(vec);
      if (nrm < best_norm) {
        best_norm = nrm;
        best = vec;
      }
    }
    c[level] = 0;
  };
  recurse(recurse, d - 1);
  return best;
}

}  // namespace latrec
