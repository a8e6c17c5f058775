#include "itershim/msymb.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace itershim::msymb {

namespace {

using IMatrix = std::vector<std::vector<Int>>;

// successive powers (u X + v Y)^i, i = 0..n, by power of Y
std::vector<std::vector<Int>> linear_powers(const Int& u, const Int& v, int n) {
  std::vector<std::vector<Int>> out{{Int(1)}};
  for (int i = 1; i <= n; ++i) {
    const auto& prev = out.back();
    std::vector<Int> next(prev.size() + 1, Int(0));
    for (std::size_t t = 0; t < prev.size(); ++t) {
      next[t] += u * prev[t];
      next[t + 1] += v * prev[t];
    }
    out.push_back(std::move(next));
  }
  return out;
}

// column j: (dX - bY)^(w-j) (-cX + aY)^j
IMatrix int_action(const Mat2& g, int w) {
  const auto left = linear_powers(g.d(), -g.b(), w), right = linear_powers(-g.c(), g.a(), w);
  const std::size_t n = static_cast<std::size_t>(w) + 1;
  IMatrix m(n, std::vector<Int>(n, Int(0)));
  for (std::size_t j = 0; j < n; ++j) {
    const auto& l = left[n - 1 - j];
    const auto& r = right[j];
    for (std::size_t s = 0; s < l.size(); ++s) {
      if (l[s] == 0) continue;
      for (std::size_t t = 0; t < r.size(); ++t) m[s + t][j] += l[s] * r[t];
    }
  }
  return m;
}

RVector add(RVector a, const RVector& b, const Rational& s = Rational(1)) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
  return a;
}

RVector mat_vec(const RMatrix& m, const RVector& v) { return linalg::multiply(m, v); }

// P (x) {inf, a} = sum_k x_{g_k^{-1} P}
RVector from_infinity(const PolySym& p, const Cusp& a) {
  RVector out(p.coeffs().size(), Rational(0));
  if (a.is_infinity()) return out;
  const auto cf = psl2z::convergents(a.value());
  for (const auto& g : cf.matrices) out = add(out, gamma_poly_action(g.inverse(), p).coeffs());
  return out;
}

std::string q_str(const Rational& r) { return r.str(); }

nlohmann::json matrix_json(const RMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& x : r) row.push_back(q_str(x));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

PolySym::PolySym(int degree) : c_(static_cast<std::size_t>(degree) + 1, Rational(0)) {
  if (degree < 0) throw std::invalid_argument("PolySym: negative degree");
}

PolySym::PolySym(int degree, RVector coeffs) : c_(std::move(coeffs)) {
  if (degree < 0 || c_.size() != static_cast<std::size_t>(degree) + 1)
    throw std::invalid_argument("PolySym: coefficient count must be degree + 1");
}

PolySym PolySym::monomial(int degree, int j) {
  PolySym p(degree);
  p[j] = 1;
  return p;
}

PolySym PolySym::operator+(const PolySym& o) const {
  if (o.degree() != degree()) throw std::invalid_argument("PolySym: degree mismatch");
  return PolySym(degree(), add(c_, o.c_));
}

PolySym PolySym::operator-(const PolySym& o) const {
  if (o.degree() != degree()) throw std::invalid_argument("PolySym: degree mismatch");
  return PolySym(degree(), add(c_, o.c_, Rational(-1)));
}

PolySym PolySym::operator*(const Rational& s) const {
  PolySym r = *this;
  for (auto& x : r.c_) x *= s;
  return r;
}

bool PolySym::is_zero() const {
  for (const auto& x : c_)
    if (x != 0) return false;
  return true;
}

Complex PolySym::eval(Complex z) const {
  Complex acc = 0.0;  // Horner in z, highest power first
  for (const auto& x : c_) acc = acc * z + static_cast<double>(x);
  return acc;
}

std::string PolySym::to_string() const {
  std::ostringstream os;
  const int w = degree();
  bool first = true;
  for (int j = 0; j <= w; ++j) {
    const Rational& x = c_[static_cast<std::size_t>(j)];
    if (x == 0) continue;
    if (!first) os << (x < 0 ? " - " : " + ");
    else if (x < 0) os << "-";
    first = false;
    Rational ax = x < 0 ? Rational(-x) : x;
    if (ax != 1 || w == 0) os << ax.str();
    if (w - j > 0) os << "X" << (w - j > 1 ? "^" + std::to_string(w - j) : "");
    if (j > 0) os << "Y" << (j > 1 ? "^" + std::to_string(j) : "");
  }
  return first ? "0" : os.str();
}

PolySym gamma_poly_action(const Mat2& g, const PolySym& p) {
  const int w = p.degree();
  const std::size_t n = static_cast<std::size_t>(w) + 1;
  // clear denominators so the product is over Z
  Int den(1);
  for (const auto& x : p.coeffs()) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(x));
  std::vector<Int> num(n);
  for (std::size_t j = 0; j < n; ++j)
    num[j] = boost::multiprecision::numerator(p.coeffs()[j]) * (den / boost::multiprecision::denominator(p.coeffs()[j]));
  const IMatrix m = int_action(g, w);
  RVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Int acc(0);
    for (std::size_t j = 0; j < n; ++j)
      if (num[j] != 0) acc += m[i][j] * num[j];
    out[i] = Rational(acc, den);
  }
  return PolySym(w, std::move(out));
}

RMatrix action_matrix(const Mat2& g, int degree) {
  const std::size_t n = static_cast<std::size_t>(degree) + 1;
  RMatrix m = linalg::zeros(n, n);
  for (int j = 0; j <= degree; ++j) {
    auto img = gamma_poly_action(g, PolySym::monomial(degree, j));
    for (std::size_t i = 0; i < n; ++i) m[i][static_cast<std::size_t>(j)] = img[static_cast<int>(i)];
  }
  return m;
}

ModularSymbol ModularSymbol::operator+(const ModularSymbol& o) const {
  ModularSymbol r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

ModularSymbol ModularSymbol::operator*(const Rational& s) const {
  ModularSymbol r = *this;
  for (auto& t : r.terms) t.coeff *= s;
  return r;
}

ModularSymbol ModularSymbol::act(const Mat2& g) const {
  ModularSymbol r;
  for (const auto& t : terms)
    r.terms.push_back({t.coeff, gamma_poly_action(g, t.poly), psl2z::mobius(g, t.alpha), psl2z::mobius(g, t.beta)});
  return r;
}

SymbolSpace::SymbolSpace(int k) : k_(k) {
  if (k < 4 || k % 2 != 0) throw std::invalid_argument("SymbolSpace: weight must be even and at least 4");
  const int w = k - 2;
  const std::size_t n = static_cast<std::size_t>(w) + 1;
  const Mat2 s = Mat2::sigma(), t = Mat2::tau();
  const RMatrix ms = action_matrix(s, w), mt = action_matrix(t, w), mt2 = action_matrix(t * t, w);

  for (std::size_t j = 0; j < n; ++j) {
    RVector r2(n), r3(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Rational e = i == j ? Rational(1) : Rational(0);
      r2[i] = e + ms[i][j];
      r3[i] = e + mt[i][j] + mt2[i][j];
    }
    relations_.push_back(std::move(r2));
    relations_.push_back(std::move(r3));
  }
  quotient_ = linalg::nullspace(relations_, n);

  // B_k: W modulo (T - 1)W, T the generator of the stabilizer of inf
  const RMatrix mT = action_matrix(Mat2::translation(1), w);
  RMatrix stab;
  for (std::size_t j = 0; j < n; ++j) {
    RVector r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = mT[i][j] - (i == j ? Rational(1) : Rational(0));
    stab.push_back(std::move(r));
  }
  boundary_functionals_ = linalg::nullspace(stab, n);

  // d x_P = [sigma P] - [P]   (0 = sigma(inf))
  boundary_matrix_ = linalg::zeros(boundary_functionals_.size(), n);
  for (std::size_t j = 0; j < n; ++j) {
    RVector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = ms[i][j] - (i == j ? Rational(1) : Rational(0));
    auto img = mat_vec(boundary_functionals_, col);
    for (std::size_t r = 0; r < img.size(); ++r) boundary_matrix_[r][j] = img[r];
  }
  for (const auto& rel : relations_)
    for (const auto& x : mat_vec(boundary_matrix_, rel))
      if (x != 0) throw std::logic_error("SymbolSpace: boundary does not vanish on relations");

  // cuspidal classes: images of ker d, keeping an independent set
  RMatrix images;
  for (auto& v : linalg::nullspace(boundary_matrix_, n)) {
    images.push_back(coordinates(v));
    if (linalg::rank(images) == images.size()) cusp_lifts_.push_back(std::move(v));
    else images.pop_back();
  }
}

RVector SymbolSpace::coordinates(const RVector& generators) const {
  if (generators.size() != static_cast<std::size_t>(k_ - 1))
    throw std::invalid_argument("SymbolSpace: generator vector has wrong length");
  return mat_vec(quotient_, generators);
}

RVector SymbolSpace::boundary_point(const PolySym& p, const Cusp& alpha) const {
  const Mat2 h = psl2z::cusp_to_infinity_inverse(alpha);  // h(inf) = alpha
  return mat_vec(boundary_functionals_, gamma_poly_action(h.inverse(), p).coeffs());
}

nlohmann::ordered_json SymbolSpace::to_json() const {
  nlohmann::ordered_json j;
  j["weight"] = k_;
  j["dimension"] = dimension();
  j["cuspidal_dimension"] = cuspidal_dimension();
  j["boundary_dimension"] = boundary_dimension();
  j["generators"] = generators();
  j["quotient_functionals"] = matrix_json(quotient_);
  j["boundary_matrix"] = matrix_json(boundary_matrix_);
  j["cuspidal_lifts"] = matrix_json(cusp_lifts_);
  return j;
}

RVector reduce_symbol(const PolySym& p, const Cusp& alpha, const Cusp& beta, Strategy strategy) {
  if (alpha == beta) return RVector(p.coeffs().size(), Rational(0));
  const Cusp zero(0, 1);
  if (strategy == Strategy::ViaInfinity && alpha != zero) {
    // {a, b} = {a, inf} + {inf, b}
    return add(from_infinity(p, beta), from_infinity(p, alpha), Rational(-1));
  }
  // {a, b} = {a, 0} + {0, b};  P (x) {0, b} ~ sigma P (x) {inf, sigma b}.
  // Also used for alpha = 0, so P (x) {0, inf} reduces to x_P itself.
  const Mat2 s = Mat2::sigma();
  const PolySym sp = gamma_poly_action(s, p);
  return add(from_infinity(sp, psl2z::mobius(s, beta)), from_infinity(sp, psl2z::mobius(s, alpha)), Rational(-1));
}

RVector reduce_symbol(const ModularSymbol& s, int degree, Strategy strategy) {
  RVector out(static_cast<std::size_t>(degree) + 1, Rational(0));
  for (const auto& t : s.terms) {
    if (t.poly.degree() != degree) throw std::invalid_argument("reduce_symbol: degree mismatch");
    out = add(out, reduce_symbol(t.poly, t.alpha, t.beta, strategy), t.coeff);
  }
  return out;
}

RVector boundary(const ModularSymbol& s, const SymbolSpace& space) {
  RVector out(static_cast<std::size_t>(space.boundary_dimension()), Rational(0));
  for (const auto& t : s.terms) {
    if (t.alpha == t.beta) continue;
    out = add(out, space.boundary_point(t.poly, t.alpha), t.coeff);
    out = add(out, space.boundary_point(t.poly, t.beta), -t.coeff);
  }
  return out;
}

RVector boundary_of_generators(const RVector& v, const SymbolSpace& space) {
  return mat_vec(space.boundary_matrix(), v);
}

int cusp_form_dimension(int k) {
  if (k < 0 || k % 2 != 0) return 0;
  if (k == 2) return 0;
  const int m = k % 12 == 2 ? k / 12 : k / 12 + 1;  // dim M_k
  return k >= 4 ? m - 1 : 0;
}

integrate::TransportOptions Pairing::default_options() {
  integrate::TransportOptions o;
  o.depth = 1;
  o.estimate_error = false;
  return o;
}

namespace {
forms::OmegaForm all_letters(const forms::CuspFormPtr& f) {
  if (!f) throw std::invalid_argument("Pairing: missing form");
  std::vector<forms::FormLetter> ls;
  for (int m = 1; m <= f->weight() - 1; ++m) ls.push_back({f, m});
  return forms::OmegaForm(std::move(ls));
}

integrate::TransportOptions depth_one(integrate::TransportOptions o) {
  o.depth = 1;
  return o;
}
}  // namespace

Pairing::Pairing(forms::CuspFormPtr f, integrate::TransportOptions opts)
    : f_(f), tr_(all_letters(f), depth_one(opts)) {
  const int w = f_->weight() - 2;
  auto j = tr_(Cusp::infinity(), Cusp(0, 1));
  for (int e = 0; e <= w; ++e) periods_.push_back(j.at({tr_.omega().find(f_->name(), w - e + 1)}));
}

Complex Pairing::generators(const RVector& v) const {
  if (v.size() != periods_.size()) throw std::invalid_argument("Pairing: generator vector has wrong length");
  Complex acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) acc += static_cast<double>(v[j]) * periods_[j];
  return acc;
}

Complex Pairing::operator()(const ModularSymbol& s) const {
  const int w = f_->weight() - 2;
  Complex acc = 0.0;
  for (const auto& t : s.terms) {
    if (t.poly.degree() != w) throw std::invalid_argument("Pairing: weight mismatch");
    if (t.alpha == t.beta) continue;
    auto j = tr_(t.beta, t.alpha);
    Complex v = 0.0;
    for (int e = 0; e <= w; ++e)
      if (t.poly[e] != 0) v += static_cast<double>(t.poly[e]) * j.at({tr_.omega().find(f_->name(), w - e + 1)});
    acc += static_cast<double>(t.coeff) * v;
  }
  return acc;
}

std::vector<std::array<double, 2>> Pairing::matrix(const SymbolSpace& space) const {
  if (space.weight() != f_->weight()) throw std::invalid_argument("Pairing: weight mismatch");
  std::vector<std::array<double, 2>> m;
  for (const auto& v : space.cuspidal_lifts()) {
    Complex p = generators(v);
    m.push_back({p.real(), p.imag()});
  }
  return m;
}

std::vector<double> Pairing::singular_values(const std::vector<std::array<double, 2>>& m) {
  if (m.empty()) return {};
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m.size()), 2);
  for (std::size_t i = 0; i < m.size(); ++i) {
    a(static_cast<Eigen::Index>(i), 0) = m[i][0];
    a(static_cast<Eigen::Index>(i), 1) = m[i][1];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

int Pairing::rank(const std::vector<std::array<double, 2>>& m, double rel_tol) {
  const auto sv = singular_values(m);
  if (sv.empty() || sv[0] == 0.0) return 0;
  int r = 0;
  for (double x : sv)
    if (x > rel_tol * sv[0]) ++r;
  return r;
}

}  // namespace itershim::msymb
