#pragma once

// A small exact coefficient group for checks that must hold with equality:
// depth-truncated series over three letters with PSL(2,Z) acting through
// the weight-4 monomial representation.

#include <cstdint>
#include <memory>
#include <random>

#include "itershim/nccoh.hpp"

namespace itershim::synthetic {

using ExactGroup = nccoh::SeriesGroup<Rational>;
using ExactCocycle = nccoh::Cocycle<ExactGroup>;

std::shared_ptr<const ExactGroup> weight4_group(int depth = 3);

/// Unital series with small random rational coefficients.
ncalg::ExactSeries random_element(const ExactGroup& g, std::mt19937_64& rng);

/// n^{-1} x(n)
ncalg::ExactSeries coboundary_part(const ExactGroup& g, const ncalg::ExactSeries& n, const psl2z::Mat2& x);

/// X = n^{-1} sigma(n), Y = m^{-1} tau(m). The relations hold exactly.
ExactCocycle genuine_pair(std::shared_ptr<const ExactGroup> g, const ncalg::ExactSeries& n,
                          const ncalg::ExactSeries& m);

/// X = 1, Y = m^{-1} tau(m) with m = 1 + A1: the sigma-tau component has
/// abelian part (1, -1, 0), which is not in the image of L(sigma tau) - 1.
ExactCocycle non_cuspidal(std::shared_ptr<const ExactGroup> g);

}  // namespace itershim::synthetic
