#include <doctest.h>

#include <numbers>
#include <random>

#include "itershim/forms.hpp"

using namespace itershim;
using namespace itershim::forms;

namespace {

// q prod (1 - q^n)^24 by repeated dense multiplication, no tricks.
std::vector<Int> naive_delta(int n_terms) {
  std::vector<Int> p(static_cast<std::size_t>(n_terms), Int(0));
  p[0] = 1;
  for (int n = 1; n < n_terms; ++n)
    for (int r = 0; r < 24; ++r)
      for (int t = n_terms - 1; t >= n; --t) p[t] -= p[t - n];
  return p;  // p[i] = a_{i+1}
}

Int sigma3(int n) {
  Int s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += Int(d) * d * d;
  return s;
}

std::shared_ptr<const CuspForm> delta_ptr() {
  static auto d = std::make_shared<const CuspForm>(delta_qexp(400));
  return d;
}

psl2z::Mat2 random_matrix(std::mt19937_64& rng, int len) {
  std::uniform_int_distribution<int> pick(0, 1);
  psl2z::Mat2 m;
  for (int i = 0; i < len; ++i) m = m * (pick(rng) ? psl2z::Mat2::sigma() : psl2z::Mat2::tau());
  return m;
}

}  // namespace

TEST_CASE("Delta coefficients") {
  auto c = delta_coefficients(60);
  CHECK(c[0] == 1);
  CHECK(c[1] == -24);
  CHECK(c[2] == 252);
  CHECK(c[3] == -1472);
  CHECK(c[4] == 4830);
  CHECK(c[5] == -6048);
  CHECK(c[6] == -16744);
  CHECK(c == naive_delta(60));
  // multiplicativity tau(mn) = tau(m) tau(n), and the Hecke relation at p = 2
  CHECK(c[5] == c[1] * c[2]);
  CHECK(c[3] == c[1] * c[1] - Int(2048));
}

TEST_CASE("Delta coefficients stay exact for large n") {
  auto c = delta_coefficients(5000);
  // Ramanujan congruence tau(n) = sigma_11(n) mod 691
  for (int n : {997, 2310, 4999}) {
    Int s = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) s += boost::multiprecision::pow(Int(d), 11);
    CHECK((c[n - 1] - s) % 691 == 0);
  }
  // Deligne bound |tau(p)| <= 2 p^(11/2)
  CHECK(abs(c[4999 - 1]).convert_to<double>() <= 2.0 * std::pow(4999.0, 5.5));
  // tau(4 * 1249) = tau(4) tau(1249)
  CHECK(c[4995] == c[3] * c[1248]);
}

TEST_CASE("Delta * E4 coefficients") {
  auto f = delta_e4_qexp(30);
  auto d = naive_delta(30);
  for (int n = 1; n <= 30; ++n) {
    Int acc = d[n - 1];
    for (int i = 1; i < n; ++i) acc += 240 * sigma3(i) * d[n - 1 - i];
    CHECK(f.exact_coefficients()[n - 1] == acc);
  }
  CHECK(f.exact_coefficients()[1] == 216);
  CHECK(f.weight() == 16);
}

TEST_CASE("modularity at 1/2 + 2i") {
  auto d = delta_ptr();
  Complex z(0.5, 2.0);
  Complex lhs = d->eval(-1.0 / z);
  Complex rhs = std::pow(z, 12) * d->eval(z);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
  auto e = std::make_shared<const CuspForm>(delta_e4_qexp(400));
  Complex l16 = e->eval(-1.0 / z), r16 = std::pow(z, 16) * e->eval(z);
  CHECK(std::abs(l16 - r16) <= 1e-10 * std::abs(r16));
}

TEST_CASE("eval guard and reduced evaluation") {
  auto d = delta_ptr();
  CHECK_THROWS_AS(d->eval(Complex(0.1, 0.01)), std::domain_error);
  CHECK_THROWS_AS(d->eval_reduced(Complex(0.1, -1.0)), std::domain_error);
  for (Complex z : {Complex(0.2, 0.3), Complex(-0.37, 0.11), Complex(3.1, 0.08)}) {
    Complex raw = d->eval(z, 0.05);
    CHECK(std::abs(d->eval_reduced(z) - raw) <= 1e-8 * std::abs(raw) + 1e-300);
  }
  // translation invariance and the tail bound shrinking with height
  CHECK(std::abs(d->eval_reduced(Complex(0.3, 0.7)) - d->eval_reduced(Complex(1.3, 0.7))) < 1e-15);
  CHECK(d->tail_bound(0.05) < 1e-10);
  auto short_d = delta_qexp(20);
  CHECK(short_d.tail_bound(1.0) < short_d.tail_bound(0.5));
  CHECK(short_d.tail_bound(0.5) > 0.0);
  // the bound dominates the actual tail
  Complex z(0.2, 0.5);
  CHECK(std::abs(short_d.eval(z, 0.0) - d->eval(z, 0.0)) <= short_d.tail_bound(0.5));
}

TEST_CASE("slash action") {
  auto d = delta_ptr();
  auto id = slash_action(d, {0, -1, 1, 0}, SlashNormalization::DetPowKMinus1);
  for (Complex z : {Complex(0.1, 0.9), Complex(-0.4, 1.5)}) CHECK(std::abs(id(z) - d->eval_reduced(z)) < 1e-10 * std::abs(d->eval_reduced(z)));
  // diag(2,1): variants differ by 2^(k-1) / 2^(k/2)
  auto a = slash_action(d, {2, 0, 0, 1}, SlashNormalization::DetPowKMinus1);
  auto b = slash_action(d, {2, 0, 0, 1}, SlashNormalization::DetPowKHalf);
  Complex z(0.1, 0.8);
  CHECK(std::abs(a(z) / b(z) - std::pow(2.0, 5.0)) < 1e-10);
  CHECK(std::abs(b(z) - std::pow(2.0, 6.0) * d->eval_reduced(2.0 * z)) < 1e-10 * std::abs(b(z)));
  CHECK_THROWS_AS(slash_action(d, {0, 1, 1, 0}, SlashNormalization::DetPowKHalf), std::invalid_argument);
}

TEST_CASE("monomial pullback") {
  const int k = 12;
  auto s = monomial_pullback(psl2z::Mat2::sigma(), k);
  for (int m = 1; m <= k - 1; ++m)
    for (int mp = 1; mp <= k - 1; ++mp) CHECK(s(mp - 1, m - 1) == (mp == k - m ? Rational(m % 2 ? 1 : -1) : Rational(0)));
  CHECK(monomial_pullback(psl2z::Mat2::identity(), k) == itershim::ncalg::LetterMap<Rational>::identity(k - 1));
  // contravariance: (gh)^* = h^* g^*
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    auto g = random_matrix(rng, 5), h = random_matrix(rng, 5);
    CHECK(monomial_pullback(g * h, k) == monomial_pullback(h, k) * monomial_pullback(g, k));
  }
}

TEST_CASE("densities transform by the pullback matrix") {
  auto d = delta_ptr();
  OmegaForm omega = close_alphabet({{d, 1}});
  REQUIRE(omega.size() == 11);
  std::mt19937_64 rng(5);
  std::vector<Complex> at_gz, at_z;
  for (int t = 0; t < 6; ++t) {
    auto g = random_matrix(rng, 4);
    auto p = pullback_matrix(g, omega);
    Complex z(0.13 * t - 0.3, 0.6 + 0.1 * t);
    Complex j = g.c().convert_to<double>() * z + g.d().convert_to<double>();
    omega.densities(psl2z::mobius(g, z), at_gz);
    omega.densities(z, at_z);
    for (int v = 0; v < omega.size(); ++v) {
      Complex lhs = at_gz[v] / (j * j);
      Complex rhs = 0.0;
      double scale = 0.0;
      for (int w = 0; w < omega.size(); ++w) {
        rhs += p(w, v).convert_to<double>() * at_z[w];
        scale += std::abs(p(w, v).convert_to<double>() * at_z[w]);
      }
      CHECK(std::abs(lhs - rhs) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("alphabet closure and letter action") {
  auto d = delta_ptr();
  OmegaForm partial({{d, 1}, {d, 11}});
  CHECK_FALSE(is_closed(partial));
  CHECK_THROWS_AS(letter_action(psl2z::Mat2::tau(), partial), std::domain_error);
  // sigma alone preserves the pair
  CHECK_NOTHROW(letter_action(psl2z::Mat2::sigma(), partial));
  OmegaForm full = close_alphabet({{d, 1}, {d, 11}});
  CHECK(full.size() == 11);
  CHECK(is_closed(full));
  CHECK(full.alphabet()->size() == 11);

  // g_* is a representation: L(gh) = L(g) L(h)
  auto s = letter_action_exact(psl2z::Mat2::sigma(), full);
  auto t = letter_action_exact(psl2z::Mat2::tau(), full);
  CHECK(s * s == itershim::ncalg::LetterMap<Rational>::identity(11));
  CHECK(t * t * t == itershim::ncalg::LetterMap<Rational>::identity(11));
  CHECK(letter_action_exact(psl2z::Mat2::sigma() * psl2z::Mat2::tau(), full) == s * t);

  CHECK_THROWS_AS(OmegaForm({{d, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(OmegaForm({{d, 12}}), std::invalid_argument);
}

TEST_CASE("form file loading") {
  nlohmann::json j = {{"name", "toy"}, {"weight", 12}, {"coefficients", {1, -24, nlohmann::json::array({252, 0.5})}}};
  auto f = form_from_json(j);
  CHECK(f.terms() == 3);
  CHECK(f.coefficient(3) == Complex(252, 0.5));
  j["weight"] = 11;
  CHECK_THROWS_AS(form_from_json(j), std::invalid_argument);
  CHECK_THROWS_AS(builtin_form("nope"), std::invalid_argument);
  CHECK(builtin_form("delta", 10).terms() == 10);
}
