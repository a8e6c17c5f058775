#include <doctest.h>

#include <random>

#include "itershim/msymb.hpp"

using namespace itershim;
using namespace itershim::msymb;

namespace {

std::mt19937& rng() {
  static std::mt19937 g(2024);
  return g;
}

Mat2 random_element(int len) {
  std::uniform_int_distribution<int> pick(0, 2);
  Mat2 g;
  for (int i = 0; i < len; ++i) g = g * (pick(rng()) == 0 ? Mat2::sigma() : pick(rng()) == 1 ? Mat2::tau() : Mat2::translation(1));
  return g;
}

PolySym random_poly(int w) {
  std::uniform_int_distribution<int> c(-5, 5);
  PolySym p(w);
  for (int j = 0; j <= w; ++j) p[j] = Rational(c(rng()), 1 + (c(rng()) + 5) % 3);
  return p;
}

Cusp random_cusp() {
  std::uniform_int_distribution<int> num(-60, 60), den(1, 30), inf(0, 9);
  if (inf(rng()) == 0) return Cusp::infinity();
  return Cusp::from_rational(Rational(num(rng()), den(rng())));
}

RVector zero(std::size_t n) { return RVector(n, Rational(0)); }

forms::CuspFormPtr delta() {
  static auto d = std::make_shared<const forms::CuspForm>(forms::delta_qexp(400));
  return d;
}

const Pairing& delta_pairing() {
  static Pairing p(delta());
  return p;
}

}  // namespace

TEST_CASE("polynomial action") {
  const int w = 10;
  PolySym p = random_poly(w);
  CHECK(gamma_poly_action(Mat2::identity(), p) == p);
  // sigma: P(X, Y) -> P(Y, -X)
  for (int j = 0; j <= w; ++j) {
    PolySym img = gamma_poly_action(Mat2::sigma(), PolySym::monomial(w, j));
    PolySym expect = PolySym::monomial(w, w - j) * Rational(j % 2 == 0 ? 1 : -1);
    CHECK(img == expect);
  }
  // T: P(X, Y) -> P(X - Y, Y); on X^2 Y^0 with w = 2
  PolySym x2 = PolySym::monomial(2, 0);
  CHECK(gamma_poly_action(Mat2::translation(1), x2) == PolySym(2, {Rational(1), Rational(-2), Rational(1)}));
  for (int i = 0; i < 20; ++i) {
    Mat2 g = random_element(6), h = random_element(6);
    PolySym q = random_poly(w);
    CHECK(gamma_poly_action(g * h, q) == gamma_poly_action(g, gamma_poly_action(h, q)));
  }
  CHECK(p.to_string() != "");
  CHECK(PolySym(2).to_string() == "0");
  CHECK(PolySym(2, {Rational(1), Rational(0), Rational(-3)}).to_string() == "X^2 - 3Y^2");
}

TEST_CASE("valence formula oracle") {
  const std::map<int, int> known{{4, 0}, {6, 0}, {8, 0}, {10, 0}, {12, 1}, {14, 0}, {16, 1},
                                 {18, 1}, {20, 1}, {22, 1}, {24, 2}, {26, 1}, {36, 3}};
  for (auto [k, d] : known) CHECK(cusp_form_dimension(k) == d);
}

TEST_CASE("dimensions of symbol spaces") {
  SymbolSpace s12(12);
  CHECK(s12.dimension() == 3);
  CHECK(s12.cuspidal_dimension() == 2);
  CHECK(s12.boundary_dimension() == 1);
  const std::vector<int> expected{0, 2, 0, 2, 2, 2, 2};
  for (int i = 0; i < 7; ++i) {
    const int k = 10 + 2 * i;
    SymbolSpace s(k);
    CHECK(s.cuspidal_dimension() == expected[static_cast<std::size_t>(i)]);
    CHECK(s.cuspidal_dimension() == 2 * cusp_form_dimension(k));
    CHECK(s.dimension() == s.cuspidal_dimension() + 1);
  }
  for (int k : {4, 6, 8, 24, 26, 36}) CHECK(SymbolSpace(k).cuspidal_dimension() == 2 * cusp_form_dimension(k));
  CHECK_THROWS_AS(SymbolSpace(11), std::invalid_argument);
  CHECK_THROWS_AS(SymbolSpace(2), std::invalid_argument);
  auto j = s12.to_json();
  CHECK(j["cuspidal_dimension"] == 2);
  CHECK(j["cuspidal_lifts"].size() == 2);
}

TEST_CASE("reduction of symbols") {
  const int k = 16, w = k - 2;
  SymbolSpace space(k);
  const std::size_t n = static_cast<std::size_t>(w) + 1;
  PolySym p = random_poly(w);
  CHECK(reduce_symbol(p, Cusp(0, 1), Cusp::infinity()) == p.coeffs());
  CHECK(reduce_symbol(p, Cusp(3, 7), Cusp(3, 7)) == zero(n));
  for (int i = 0; i < 30; ++i) {
    Cusp a = random_cusp(), b = random_cusp(), c = random_cusp();
    PolySym q = random_poly(w);
    RVector sum = zero(n);
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}})
      for (std::size_t t = 0; t < n; ++t) sum[t] += reduce_symbol(q, x, y)[t];
    CHECK(space.coordinates(sum) == zero(static_cast<std::size_t>(space.dimension())));
    // strategies agree in MS_k
    CHECK(space.coordinates(reduce_symbol(q, a, b, Strategy::ViaInfinity)) ==
          space.coordinates(reduce_symbol(q, a, b, Strategy::ViaZero)));
    // Gamma-invariance of classes
    ModularSymbol s(q, a, b);
    Mat2 g = random_element(5);
    CHECK(space.coordinates(reduce_symbol(s.act(g), w)) == space.coordinates(reduce_symbol(s, w)));
  }
}

TEST_CASE("boundary map") {
  const int k = 12, w = k - 2;
  SymbolSpace space(k);
  const std::size_t nb = static_cast<std::size_t>(space.boundary_dimension());
  PolySym p = random_poly(w);
  CHECK(boundary(ModularSymbol(p, Cusp(2, 5), Cusp(2, 5)), space) == zero(nb));
  for (int i = 0; i < 20; ++i) {
    ModularSymbol s(random_poly(w), random_cusp(), random_cusp());
    auto direct = boundary(s, space);
    CHECK(boundary(s.act(random_element(5)), space) == direct);
    CHECK(boundary_of_generators(reduce_symbol(s, w), space) == direct);
  }
  for (const auto& v : space.cuspidal_lifts()) CHECK(boundary_of_generators(v, space) == zero(nb));
  // the generator for X^w has nonzero boundary
  RVector xw = PolySym::monomial(w, 0).coeffs();
  CHECK(boundary_of_generators(xw, space) != zero(nb));
}

TEST_CASE("pairing with Delta") {
  const auto& pair = delta_pairing();
  SymbolSpace space(12);
  CHECK(pair(ModularSymbol()) == Complex(0.0));
  CHECK(pair.generators(zero(11)) == Complex(0.0));

  auto m = pair.matrix(space);
  CHECK(m.size() == 2);
  CHECK(Pairing::rank(m) == 2);

  // every relation vector is annihilated
  double scale = 0.0;
  for (int j = 0; j <= 10; ++j) scale = std::max(scale, std::abs(pair.generators(PolySym::monomial(10, j).coeffs())));
  CHECK(scale > 1e-4);
  for (const auto& r : space.relations()) CHECK(std::abs(pair.generators(r)) < 1e-8 * scale);

  // direct quadrature between arbitrary cusps agrees with the reduced form
  for (int i = 0; i < 5; ++i) {
    ModularSymbol s(random_poly(10), random_cusp(), random_cusp());
    Complex direct = pair(s), reduced = pair.generators(reduce_symbol(s, 10));
    CHECK(std::abs(direct - reduced) < 1e-8 * std::max(1.0, std::abs(direct)));
  }
  CHECK_THROWS_AS(pair.matrix(SymbolSpace(16)), std::invalid_argument);
}
