#include "nrrd/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace nrrd {

// Banded Gaussian elimination with partial pivoting, the classic LINPACK
// scheme. After the factorization the storage holds U in rows 0..kl+ku and
// the multipliers below the diagonal row.
void BandMatrix::factor() {
  const int m = kl_ + ku_;  // storage row of the diagonal
  ipiv_.assign(n_, 0);
  auto entry = [&](int r, int j) -> double& {
    return ab_[static_cast<std::size_t>(j) * ldab_ + r];
  };

  for (int j = 0; j < n_; ++j) {
    const int lm = std::min(kl_, n_ - 1 - j);  // subdiagonal rows in column j

    int l = 0;
    double best = std::abs(entry(m, j));
    for (int k = 1; k <= lm; ++k) {
      const double cand = std::abs(entry(m + k, j));
      if (cand > best) {
        best = cand;
        l = k;
      }
    }
    ipiv_[j] = j + l;
    if (best == 0.0) throw SolvabilityError("band lu: exactly singular pivot");

    const int last = std::min(j + m, n_ - 1);  // rightmost column touching row j
    if (l != 0)
      for (int jj = j; jj <= last; ++jj)
        std::swap(entry(m + j - jj, jj), entry(m + j + l - jj, jj));

    const double piv = entry(m, j);
    for (int k = 1; k <= lm; ++k) entry(m + k, j) /= piv;

    for (int jj = j + 1; jj <= last; ++jj) {
      const double t = entry(m + j - jj, jj);
      if (t == 0.0) continue;
      for (int k = 1; k <= lm; ++k) entry(m + j + k - jj, jj) -= t * entry(m + k, j);
    }
  }
  factored_ = true;
}

void BandMatrix::solve(std::vector<double>& b) const {
  if (!factored_) throw StateError("band lu: solve before factor");
  if (static_cast<int>(b.size()) != n_) throw StateError("band lu: rhs size mismatch");
  const int m = kl_ + ku_;
  const auto entry = [&](int r, int j) {
    return ab_[static_cast<std::size_t>(j) * ldab_ + r];
  };

  for (int j = 0; j < n_ - 1; ++j) {
    if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
    const int lm = std::min(kl_, n_ - 1 - j);
    for (int k = 1; k <= lm; ++k) b[j + k] -= b[j] * entry(m + k, j);
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b[j] /= entry(m, j);
    const int lm = std::min(m, j);
    for (int k = 1; k <= lm; ++k) b[j - k] -= b[j] * entry(m - k, j);
  }
}

}  // namespace nrrd
