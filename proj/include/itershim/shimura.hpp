#pragma once

// The iterated Shimura cocycle gamma -> J_{gamma a}^{a}, its values X, Y at
// sigma and tau, and the continued-fraction splitting of J_{i inf}^{a}.

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/integrate.hpp"
#include "itershim/nccoh.hpp"

namespace itershim::shimura {

using Complex = std::complex<double>;
using ncalg::Series;
using psl2z::ExtendedPoint;
using psl2z::Mat2;
using Group = nccoh::SeriesGroup<Complex>;
using Cocycle = nccoh::Cocycle<Group>;

/// PSL(2,Z) acting on series through the transporter's letter maps.
std::shared_ptr<const Group> series_group(const integrate::Transporter& tr);

class ShimuraCocycle {
 public:
  /// X = J_{sigma a}^{a}, Y = J_{tau a}^{a}; throws if the relations fail
  /// beyond tol.
  ShimuraCocycle(const integrate::Transporter& tr, ExtendedPoint a, double tol = 1e-6);

  const ExtendedPoint& base() const { return base_; }
  const Series& X() const { return cocycle_.X(); }
  const Series& Y() const { return cocycle_.Y(); }
  const Cocycle& cocycle() const { return cocycle_; }
  const Group& group() const { return cocycle_.group(); }
  const integrate::Transporter& transporter() const { return *tr_; }

  /// Value of the extension from (X, Y).
  Series operator()(const Mat2& g) const { return cocycle_(g); }
  /// J_{g a}^{a} by direct transport.
  Series direct(const Mat2& g) const;
  /// max distance between extension and direct transport.
  double extension_residual(const std::vector<Mat2>& elements) const;
  /// Largest coefficient among the factors h(X), h(Y) multiplied along the
  /// normal form of g; the roundoff floor of the extension scales with it.
  double extension_scale(const Mat2& g) const;
  /// As extension_residual, but measured against max(1, |direct|, extension_scale).
  double conditioned_extension_residual(const std::vector<Mat2>& elements) const;

  nlohmann::ordered_json report() const;

 private:
  const integrate::Transporter* tr_;
  ExtendedPoint base_;
  Cocycle cocycle_;
};

/// Residual of u_{a'}(g) = n^{-1} u_a(g) g(n) with n = J_{a'}^{a}, over the
/// given elements.
double base_point_independence(const ShimuraCocycle& u, const ShimuraCocycle& u2, const std::vector<Mat2>& elements);

/// J_{sigma rho}^{rho} against J_i^{rho} sigma(J_i^{rho})^{-1}, each side by
/// its own chord. Only needs the alphabet to be closed under sigma.
double rho_sigma_identity(const forms::OmegaForm& omega, int depth, int nodes = 20);

struct CfDecomposition {
  Rational a;
  std::string orientation;  // "0->inf" or "inf->0": which primitive integral P is
  int factors = 0;
  Series product, direct;
  double residual = 0.0;         // scaled_diff(product, direct)
  double depth1_residual = 0.0;  // same on the abelian (depth-1) layer
  double calibration_gap = 0.0;  // depth-1 residual of the rejected orientation
  nlohmann::ordered_json to_json() const;
};

/// J_{i inf}^{a} = prod_{k=n..0} g_k*(P) with the convergent matrices g_k of a.
/// The orientation of P is calibrated at depth 1 against direct transport.
CfDecomposition cf_decomposition(const integrate::Transporter& tr, const Rational& a);

}  // namespace itershim::shimura
