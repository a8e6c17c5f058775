#include "itershim/linalg.hpp"

#include <stdexcept>

namespace itershim::linalg {

RMatrix zeros(std::size_t rows, std::size_t cols) { return RMatrix(rows, RVector(cols, Rational(0))); }

Rref rref(RMatrix a) {
  Rref r;
  if (a.empty()) return r;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t piv = row;
    while (piv < rows && a[piv][col] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[row]);
    const Rational inv = 1 / a[row][col];
    for (std::size_t j = col; j < cols; ++j) a[row][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j < cols; ++j)
        if (a[row][j] != 0) a[i][j] -= f * a[row][j];
    }
    r.pivots.push_back(col);
    ++row;
  }
  r.m = std::move(a);
  return r;
}

std::size_t rank(const RMatrix& a) { return rref(a).rank(); }

std::vector<RVector> nullspace(const RMatrix& a, std::size_t cols) {
  Rref r = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<RVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RVector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.m[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RVector> solve(const RMatrix& a, const RVector& b, std::size_t cols) {
  if (a.size() != b.size()) throw std::invalid_argument("solve: dimension mismatch");
  RMatrix aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    if (aug[i].size() != cols) throw std::invalid_argument("solve: ragged matrix");
    aug[i].push_back(b[i]);
  }
  Rref r = rref(std::move(aug));
  if (!r.pivots.empty() && r.pivots.back() == cols) return std::nullopt;
  RVector x(cols, Rational(0));
  for (std::size_t i = 0; i < r.pivots.size(); ++i) x[r.pivots[i]] = r.m[i][cols];
  return x;
}

RVector multiply(const RMatrix& a, const RVector& x) {
  RVector y(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (a[i][j] != 0 && x[j] != 0) y[i] += a[i][j] * x[j];
  return y;
}

}  // namespace itershim::linalg
