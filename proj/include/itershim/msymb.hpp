#pragma once

// Classical modular symbols of level 1 with coefficients in homogeneous
// polynomials of degree k - 2, over Q. Finite presentation by the generators
// x_P = P (x) {0, inf} modulo x + sigma x and x + tau x + tau^2 x.

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/forms.hpp"
#include "itershim/integrate.hpp"
#include "itershim/linalg.hpp"
#include "itershim/psl2z.hpp"

namespace itershim::msymb {

using Complex = std::complex<double>;
using linalg::RMatrix;
using linalg::RVector;
using psl2z::Cusp;
using psl2z::Mat2;

/// P(X, Y) = sum_j c_j X^(w-j) Y^j, homogeneous of degree w.
class PolySym {
 public:
  explicit PolySym(int degree);
  PolySym(int degree, RVector coeffs);
  static PolySym monomial(int degree, int j);  // X^(w-j) Y^j

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const RVector& coeffs() const { return c_; }
  Rational& operator[](int j) { return c_.at(static_cast<std::size_t>(j)); }
  const Rational& operator[](int j) const { return c_.at(static_cast<std::size_t>(j)); }

  PolySym operator+(const PolySym& o) const;
  PolySym operator-(const PolySym& o) const;
  PolySym operator*(const Rational& s) const;
  bool operator==(const PolySym& o) const = default;
  bool is_zero() const;

  /// P(z, 1)
  Complex eval(Complex z) const;
  std::string to_string() const;

 private:
  RVector c_;
};

/// (g P)(X, Y) = P(dX - bY, -cX + aY); a left action, (gh)P = g(hP).
PolySym gamma_poly_action(const Mat2& g, const PolySym& p);
/// Matrix of P -> gP on the monomial basis (column j is the image of X^(w-j) Y^j).
RMatrix action_matrix(const Mat2& g, int degree);

struct Term {
  Rational coeff;
  PolySym poly;
  Cusp alpha, beta;
};

/// Formal combination of P (x) {alpha, beta}.
struct ModularSymbol {
  std::vector<Term> terms;

  ModularSymbol() = default;
  ModularSymbol(PolySym p, Cusp alpha, Cusp beta) { terms.push_back({Rational(1), std::move(p), alpha, beta}); }
  ModularSymbol operator+(const ModularSymbol& o) const;
  ModularSymbol operator*(const Rational& s) const;
  /// g (P (x) {a, b}) = gP (x) {ga, gb}
  ModularSymbol act(const Mat2& g) const;
};

enum class Strategy { ViaInfinity, ViaZero };

class SymbolSpace {
 public:
  explicit SymbolSpace(int k);

  int weight() const { return k_; }
  int degree() const { return k_ - 2; }
  int generators() const { return k_ - 1; }
  int dimension() const { return static_cast<int>(quotient_.size()); }
  int cuspidal_dimension() const { return static_cast<int>(cusp_lifts_.size()); }
  int boundary_dimension() const { return static_cast<int>(boundary_functionals_.size()); }

  /// Rows are the relation vectors e + sigma e, e + tau e + tau^2 e.
  const RMatrix& relations() const { return relations_; }
  /// Rows are functionals on the generators that vanish on every relation;
  /// they give coordinates on MS_k.
  const RMatrix& quotient_functionals() const { return quotient_; }
  /// Rows are functionals on W that vanish on (T - 1)W; coordinates on B_k.
  const RMatrix& boundary_functionals() const { return boundary_functionals_; }
  /// Boundary map on generator coordinates, dim B_k x (k - 1).
  const RMatrix& boundary_matrix() const { return boundary_matrix_; }
  /// Generator vectors whose classes form a basis of the cuspidal subspace.
  const std::vector<RVector>& cuspidal_lifts() const { return cusp_lifts_; }

  /// Coordinates in MS_k of a generator vector.
  RVector coordinates(const RVector& generators) const;
  /// Class of P (x) {alpha} in B_k.
  RVector boundary_point(const PolySym& p, const Cusp& alpha) const;

  nlohmann::ordered_json to_json() const;

 private:
  int k_;
  RMatrix relations_, quotient_, boundary_functionals_, boundary_matrix_;
  std::vector<RVector> cusp_lifts_;
};

/// P (x) {alpha, beta} as a vector of generator coefficients (the coefficient
/// of j is that of x_{X^(w-j) Y^j}). Exact; different strategies agree in MS_k.
RVector reduce_symbol(const PolySym& p, const Cusp& alpha, const Cusp& beta, Strategy strategy = Strategy::ViaInfinity);
RVector reduce_symbol(const ModularSymbol& s, int degree, Strategy strategy = Strategy::ViaInfinity);

/// Image in B_k: P (x) {alpha, beta} -> P (x) {alpha} - P (x) {beta}.
RVector boundary(const ModularSymbol& s, const SymbolSpace& space);
/// Boundary of a generator vector.
RVector boundary_of_generators(const RVector& v, const SymbolSpace& space);

/// dim S_k for level 1 by the valence formula.
int cusp_form_dimension(int k);

/// f -> int_beta^alpha f(z) P(z, 1) dz through depth-1 transport over the
/// letters (f, m), m = 1..k-1.
class Pairing {
 public:
  explicit Pairing(forms::CuspFormPtr f, integrate::TransportOptions opts = default_options());

  Complex operator()(const ModularSymbol& s) const;
  /// Pairing of sum_j v_j x_{e_j}.
  Complex generators(const RVector& v) const;
  /// Rows (Re, Im) of the pairing of each cuspidal basis lift.
  std::vector<std::array<double, 2>> matrix(const SymbolSpace& space) const;
  /// Singular values, largest first.
  static std::vector<double> singular_values(const std::vector<std::array<double, 2>>& m);
  /// Numerical rank by SVD with relative threshold.
  static int rank(const std::vector<std::array<double, 2>>& m, double rel_tol = 1e-8);

  static integrate::TransportOptions default_options();

 private:
  forms::CuspFormPtr f_;
  integrate::Transporter tr_;
  std::vector<Complex> periods_;  // int_inf^0 f z^(w-j) dz
};

}  // namespace itershim::msymb
