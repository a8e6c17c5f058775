#include <doctest.h>

#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "itershim/integrate.hpp"

using namespace itershim;
using namespace itershim::integrate;
using psl2z::Cusp;
using psl2z::Mat2;

namespace {

forms::CuspFormPtr delta() {
  static auto d = std::make_shared<const forms::CuspForm>(forms::delta_qexp(400));
  return d;
}

const Transporter& transporter(int depth) {
  static std::map<int, Transporter> cache;
  auto it = cache.find(depth);
  if (it == cache.end()) {
    TransportOptions o;
    o.depth = depth;
    it = cache.emplace(depth, Transporter(forms::close_alphabet({{delta(), 1}}), o)).first;
  }
  return it->second;
}

// Independent oracle: adaptive Gauss-Kronrod on a real parameter.
Complex line_integral(const std::function<Complex(double)>& integrand, double t0, double t1) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double t) { return integrand(t).real(); };
  auto im = [&](double t) { return integrand(t).imag(); };
  return {gauss_kronrod<double, 61>::integrate(re, t0, t1, 15, 1e-14),
          gauss_kronrod<double, 61>::integrate(im, t0, t1, 15, 1e-14)};
}

Mat2 random_matrix(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 1);
  Mat2 m;
  for (int i = len(rng); i > 0; --i) m = m * (pick(rng) ? Mat2::sigma() : Mat2::tau());
  return m;
}

}  // namespace

TEST_CASE("gauss rule and cumulative matrix") {
  const auto& r = gauss_rule(12);
  double s = 0.0;
  for (int j = 0; j < r.n(); ++j) s += r.weights[j] * std::pow(r.nodes[j], 22);
  CHECK(s == doctest::Approx(2.0 / 23).epsilon(1e-14));
  for (int i = 0; i < r.n(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < r.n(); ++j) acc += r.cumulative[i * r.n() + j] * std::pow(r.nodes[j], 7);
    CHECK(acc == doctest::Approx((std::pow(r.nodes[i], 8) - 1.0) / 8.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_rule(1), std::invalid_argument);
}

TEST_CASE("zero-length segment and trivial transport") {
  const auto& tr = transporter(3);
  auto s = iterated_segment(tr.omega(), Segment::chord({0.3, 1.0}, {0.3, 1.0}), 3);
  CHECK(max_abs_diff(s, Series::one(tr.alphabet(), 3)) == 0.0);
  for (psl2z::ExtendedPoint p : {psl2z::ExtendedPoint(Complex(0, 2)), psl2z::ExtendedPoint(Cusp(3, 5)),
                                 psl2z::ExtendedPoint(Cusp::infinity())})
    CHECK(max_abs_diff(tr(p, p), Series::one(tr.alphabet(), 3)) == 0.0);
}

TEST_CASE("depth one agrees with ordinary line integrals") {
  const auto& tr = transporter(2);
  const auto& omega = tr.omega();
  Complex a(-0.4, 0.7), b(0.9, 1.6);
  auto j = iterated_segment(omega, Segment::chord(a, b), 1);
  std::vector<Complex> dens;
  for (int v = 0; v < omega.size(); ++v) {
    Complex ref = line_integral(
        [&](double t) {
          omega.densities(a + t * (b - a), dens);
          return dens[v] * (b - a);
        },
        0.0, 1.0);
    CHECK(std::abs(j.at({v}) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("depth one from i infinity to 0 against a direct quadrature") {
  const auto& tr = transporter(1);
  auto j = tr(Cusp::infinity(), Cusp(0, 1));
  auto f = delta();
  for (int m : {1, 4, 6, 11}) {
    int v = tr.omega().find("delta", m);
    // int_{i inf}^{0} f(z) z^(m-1) dz along z = i t
    auto integrand = [&](double t) {
      Complex z(0.0, t);
      return -f->eval_reduced(z) * std::pow(z, m - 1) * Complex(0.0, 1.0);
    };
    Complex ref = line_integral(integrand, 0.02, 1.0) + line_integral(integrand, 1.0, 15.0);
    CHECK(std::abs(j.at({v}) - ref) < 1e-10 * std::max(1e-3, std::abs(ref)));
  }
}

TEST_CASE("transport is group-like") {
  const auto& tr = transporter(3);
  for (auto [a, b] : std::vector<std::pair<psl2z::ExtendedPoint, psl2z::ExtendedPoint>>{
           {Complex(0, 2), Complex(1, 1)}, {Cusp::infinity(), Cusp(0, 1)}, {Cusp(3, 5), Complex(0.2, 0.9)}}) {
    auto t = tr.transport(a, b);
    CHECK(t.result.is_unital());
    CHECK(ncalg::grouplike_residual(t.result, true) < 1e-8);
    CHECK(t.error_estimate < 1e-8);
  }
}

TEST_CASE("concatenation, path independence and inverse law at depth 3") {
  const auto& tr = transporter(3);
  Complex a(0, 2), b(0, 1), c(1, 1);
  auto ac = tr(a, c), bc = tr(b, c), ab = tr(a, b);
  CHECK(ncalg::scaled_diff(ac, bc * ab) < 1e-8);

  Complex i(0, 1), e(1, 1), detour(2, 2);
  auto direct = tr(i, e);
  auto via = tr.along_chords({i, detour, e}).result;
  CHECK(ncalg::scaled_diff(direct, via) < 1e-8);

  CHECK(ncalg::scaled_diff(tr(c, a), ncalg::inverse(ac)) < 1e-8);
  auto cusp_pair = tr(Cusp::infinity(), Cusp(1, 2));
  CHECK(ncalg::scaled_diff(tr(Cusp(1, 2), Cusp::infinity()), ncalg::inverse(cusp_pair)) < 1e-8);
  // through a cusp
  auto via_cusp = tr(Cusp(0, 1), Complex(0.5, 0.5)) * tr(Complex(0, 2), Cusp(0, 1));
  CHECK(ncalg::scaled_diff(via_cusp, tr(Complex(0, 2), Complex(0.5, 0.5))) < 1e-8);
}

TEST_CASE("left-most letter is the outermost integral") {
  // Along a segment, F_{vw} = int phi_v F_w: with two letters split across
  // a concatenation, the outer letter is the one integrated later.
  const auto& tr = transporter(2);
  Complex a(0, 1), b(0.5, 1), c(0.5, 2);
  auto ab = tr(a, b), bc = tr(b, c), ac = bc * ab;
  int u = 0, v = 3;
  Complex expected_cross = bc.at({u}) * ab.at({v});
  Complex inner = ac.at({u, v}) - bc.at({u, v}) - ab.at({u, v});
  CHECK(std::abs(inner - expected_cross) < 1e-12 * std::max(1.0, std::abs(expected_cross)));
  CHECK(ncalg::scaled_diff(tr(a, c), ac) < 1e-8);
}

TEST_CASE("equivariance") {
  const auto& tr = transporter(3);
  Complex i(0, 1), rho = std::polar(1.0, std::numbers::pi / 3.0);
  CHECK(tr.equivariance_check(Mat2::identity(), i, Complex(0.3, 2.0)) < 1e-12);
  CHECK(tr.equivariance_check(Mat2::sigma(), rho, i) < 1e-6);
  CHECK(tr.equivariance_check(Mat2::sigma() * Mat2::tau(), i, Complex(0, 2)) < 1e-6);

  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> x(-0.5, 0.5), y(0.6, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    Mat2 g = random_matrix(rng, 4);
    worst = std::max(worst, tr.equivariance_check(g, Complex(x(rng), y(rng)), Complex(x(rng), y(rng))));
  }
  CHECK(worst < 1e-6);
  CHECK(tr.equivariance_check(Mat2::tau(), Cusp::infinity(), Complex(0.1, 1.3)) < 1e-6);
}

TEST_CASE("transport refuses an open alphabet and bad points") {
  CHECK_THROWS_AS(Transporter(forms::OmegaForm({{delta(), 1}, {delta(), 11}})), std::invalid_argument);
  CHECK_THROWS_AS(Segment::chord({0, 1}, {1, -1}), std::domain_error);
  const auto& tr = transporter(1);
  auto t = tr.transport(Cusp::infinity(), Complex(0.2, 0.8));
  auto j = t.diagnostics();
  CHECK(j["segments"].size() == 2);
  CHECK(j["segments"][0]["kind"] == "tail from inf");
}
