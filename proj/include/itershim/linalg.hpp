#pragma once

// Small dense linear algebra over Q by row reduction.

#include <optional>
#include <vector>

#include "itershim/psl2z.hpp"

namespace itershim::linalg {

using RVector = std::vector<Rational>;
using RMatrix = std::vector<RVector>;  // row-major, rows may not be ragged

RMatrix zeros(std::size_t rows, std::size_t cols);

struct Rref {
  RMatrix m;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

Rref rref(RMatrix a);
std::size_t rank(const RMatrix& a);
/// Basis of {x : a x = 0}.
std::vector<RVector> nullspace(const RMatrix& a, std::size_t cols);
/// Some x with a x = b, or nothing when inconsistent.
std::optional<RVector> solve(const RMatrix& a, const RVector& b, std::size_t cols);
RVector multiply(const RMatrix& a, const RVector& x);

}  // namespace itershim::linalg
