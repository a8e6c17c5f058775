#include "itershim/psl2z.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace itershim::psl2z {

namespace {

// Floor division for arbitrary-precision integers (den != 0).
Int floor_div(const Int& num, const Int& den) {
  Int q = num / den;
  Int r = num - q * den;
  if (r != 0 && ((r < 0) != (den < 0))) q -= 1;
  return q;
}

// Returns g = gcd(a, b) >= 0 and s, t with a*s + b*t = g.
Int ext_gcd(const Int& a, const Int& b, Int& s, Int& t) {
  Int old_r = a, r = b, old_s = 1, s1 = 0, old_t = 0, t1 = 1;
  while (r != 0) {
    Int quot = old_r / r;
    Int tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s1;
    old_s = s1;
    s1 = tmp;
    tmp = old_t - quot * t1;
    old_t = t1;
    t1 = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  s = old_s;
  t = old_t;
  return old_r;
}

void append_translation(std::vector<Token>& out, const Int& n) {
  // T = tau^2 sigma, T^{-1} = sigma tau (projectively).
  if (n > 0) {
    for (Int k = 0; k < n; ++k) {
      out.push_back(Token::TauSq);
      out.push_back(Token::Sigma);
    }
  } else {
    for (Int k = 0; k < -n; ++k) {
      out.push_back(Token::Sigma);
      out.push_back(Token::Tau);
    }
  }
}

int tau_exponent(Token t) { return t == Token::Tau ? 1 : 2; }

}  // namespace

double to_double(const Int& v) { return v.convert_to<double>(); }

// ---------------------------------------------------------------------------
// Mat2

Mat2::Mat2(Int a, Int b, Int c, Int d)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
  if (a_ * d_ - b_ * c_ != 1)
    throw std::invalid_argument("Mat2: determinant must be 1");
  normalize_sign();
}

void Mat2::normalize_sign() {
  const Int* first = a_ != 0 ? &a_ : b_ != 0 ? &b_ : c_ != 0 ? &c_ : &d_;
  if (*first < 0) {
    a_ = -a_;
    b_ = -b_;
    c_ = -c_;
    d_ = -d_;
  }
}

Mat2 Mat2::sigma() { return Mat2(0, -1, 1, 0); }
Mat2 Mat2::tau() { return Mat2(0, -1, 1, -1); }
Mat2 Mat2::translation(const Int& n) { return Mat2(1, n, 0, 1); }

Mat2 Mat2::inverse() const { return Mat2(d_, -b_, -c_, a_); }

Mat2 Mat2::operator*(const Mat2& o) const {
  return Mat2(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
              c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
}

std::string Mat2::to_string() const {
  std::ostringstream os;
  os << "(" << a_ << " " << b_ << "; " << c_ << " " << d_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Words

GroupWord::GroupWord(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 1; i < tokens_.size(); ++i) {
    bool prev_sigma = tokens_[i - 1] == Token::Sigma;
    bool cur_sigma = tokens_[i] == Token::Sigma;
    if (prev_sigma == cur_sigma)
      throw std::invalid_argument("GroupWord: sigma and tau tokens must alternate");
  }
}

GroupWord GroupWord::parse(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (ch == 's') {
      out.push_back(Token::Sigma);
      ++i;
    } else if (ch == 't') {
      if (i + 1 < text.size() && text[i + 1] == 't') {
        if (i + 2 < text.size() && text[i + 2] == 't')
          throw std::invalid_argument("GroupWord: tau run longer than 2 in '" + text + "'");
        out.push_back(Token::TauSq);
        i += 2;
      } else {
        out.push_back(Token::Tau);
        ++i;
      }
    } else {
      throw std::invalid_argument("GroupWord: unexpected character in '" + text + "'");
    }
  }
  return GroupWord(std::move(out));
}

int GroupWord::length() const {
  int l = 0;
  for (Token t : tokens_) l += t == Token::TauSq ? 2 : 1;
  return l;
}

std::string GroupWord::to_string() const {
  std::string s;
  for (Token t : tokens_) s += t == Token::Sigma ? "s" : t == Token::Tau ? "t" : "tt";
  return s;
}

GroupWord reduce_tokens(const std::vector<Token>& tokens) {
  std::vector<Token> stack;
  for (Token t : tokens) {
    if (stack.empty()) {
      stack.push_back(t);
      continue;
    }
    Token top = stack.back();
    if (t == Token::Sigma && top == Token::Sigma) {
      stack.pop_back();
    } else if (t != Token::Sigma && top != Token::Sigma) {
      int e = (tau_exponent(t) + tau_exponent(top)) % 3;
      stack.pop_back();
      if (e != 0) stack.push_back(e == 1 ? Token::Tau : Token::TauSq);
    } else {
      stack.push_back(t);
    }
  }
  return GroupWord(std::move(stack));
}

Mat2 token_matrix(Token t) {
  switch (t) {
    case Token::Sigma:
      return Mat2::sigma();
    case Token::Tau:
      return Mat2::tau();
    case Token::TauSq:
      return Mat2::tau() * Mat2::tau();
  }
  throw std::logic_error("unreachable");
}

Mat2 eval_word(const GroupWord& w) {
  Mat2 m;
  for (Token t : w.tokens()) m = m * token_matrix(t);
  return m;
}

GroupWord normal_form(const Mat2& m) {
  // Euclid on the first column: m = W * current at every step.
  std::vector<Token> raw;
  Int a = m.a(), b = m.b(), c = m.c(), d = m.d();
  while (c != 0) {
    Int n = floor_div(a, c);
    append_translation(raw, n);
    a -= n * c;
    b -= n * d;
    raw.push_back(Token::Sigma);
    // sigma * (a b; c d) = (-c -d; a b)
    Int na = -c, nb = -d;
    c = a;
    d = b;
    a = na;
    b = nb;
  }
  // current = +-(1 n; 0 1)
  append_translation(raw, a * b);
  return reduce_tokens(raw);
}

std::vector<GroupWord> enumerate_words(int max_length) {
  std::vector<GroupWord> out{GroupWord()};
  // Breadth-first by appending one token that keeps alternation.
  std::vector<std::pair<std::vector<Token>, int>> queue{{{}, 0}};
  std::size_t head = 0;
  while (head < queue.size()) {
    auto [toks, len] = queue[head++];
    for (Token t : {Token::Sigma, Token::Tau, Token::TauSq}) {
      if (!toks.empty() && ((toks.back() == Token::Sigma) == (t == Token::Sigma))) continue;
      int nl = len + (t == Token::TauSq ? 2 : 1);
      if (nl > max_length) continue;
      auto nt = toks;
      nt.push_back(t);
      out.emplace_back(nt);
      queue.emplace_back(std::move(nt), nl);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GroupWord& x, const GroupWord& y) { return x.length() < y.length(); });
  return out;
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  std::vector<Token> toks = word.tokens();
  toks.insert(toks.end(), o.word.tokens().begin(), o.word.tokens().end());
  return {mat * o.mat, reduce_tokens(toks)};
}

GroupElement GroupElement::inverse() const {
  std::vector<Token> toks;
  for (auto it = word.tokens().rbegin(); it != word.tokens().rend(); ++it)
    toks.push_back(*it == Token::Sigma ? Token::Sigma : *it == Token::Tau ? Token::TauSq : Token::Tau);
  return {mat.inverse(), GroupWord(std::move(toks))};
}

// ---------------------------------------------------------------------------
// Cusps and the Mobius action

Cusp::Cusp(Int num, Int den) : p(std::move(num)), q(std::move(den)) {
  if (p == 0 && q == 0) throw std::invalid_argument("Cusp: 0/0");
  if (q == 0) {
    p = 1;
    return;
  }
  Int g = boost::multiprecision::gcd(p, q);
  p /= g;
  q /= g;
  if (q < 0) {
    p = -p;
    q = -q;
  }
}

Cusp Cusp::from_rational(const Rational& r) {
  return Cusp(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

Rational Cusp::value() const {
  if (is_infinity()) throw std::domain_error("Cusp: infinity has no rational value");
  return Rational(p, q);
}

std::string Cusp::to_string() const {
  if (is_infinity()) return "inf";
  std::ostringstream os;
  os << p;
  if (q != 1) os << "/" << q;
  return os.str();
}

Cusp Cusp::parse(const std::string& text) {
  if (text == "inf" || text == "oo" || text == "infinity") return infinity();
  auto slash = text.find('/');
  if (slash == std::string::npos) return Cusp(Int(text), 1);
  return Cusp(Int(text.substr(0, slash)), Int(text.substr(slash + 1)));
}

Cusp mobius(const Mat2& m, const Cusp& p) {
  return Cusp(m.a() * p.p + m.b() * p.q, m.c() * p.p + m.d() * p.q);
}

Complex mobius(const Mat2& m, Complex z) {
  double a = to_double(m.a()), b = to_double(m.b()), c = to_double(m.c()), d = to_double(m.d());
  return (a * z + b) / (c * z + d);
}

ExtendedPoint mobius(const Mat2& m, const ExtendedPoint& p) {
  if (const auto* c = std::get_if<Cusp>(&p)) return mobius(m, *c);
  return mobius(m, std::get<Complex>(p));
}

bool is_cusp(const ExtendedPoint& p) { return std::holds_alternative<Cusp>(p); }

std::string point_to_string(const ExtendedPoint& p) {
  if (const auto* c = std::get_if<Cusp>(&p)) return c->to_string();
  const auto& z = std::get<Complex>(p);
  std::ostringstream os;
  os.precision(17);
  os << z.real() << "," << z.imag();
  return os.str();
}

ExtendedPoint parse_point(const std::string& text) {
  if (text == "i") return Complex(0.0, 1.0);
  if (text == "rho") return std::polar(1.0, std::numbers::pi / 3.0);
  auto comma = text.find(',');
  if (comma != std::string::npos) {
    double x = std::stod(text.substr(0, comma));
    double y = std::stod(text.substr(comma + 1));
    if (!(y > 0)) throw std::invalid_argument("point must lie in the upper half plane: " + text);
    return Complex(x, y);
  }
  return Cusp::parse(text);
}

Mat2 cusp_to_infinity_inverse(const Cusp& c) {
  if (c.is_infinity()) return Mat2::identity();
  Int s, t;
  ext_gcd(c.p, c.q, s, t);  // p*s + q*t = 1
  return Mat2(c.p, -t, c.q, s);
}

GroupElement cusp_stabilizer_generator(const Cusp& c) {
  Mat2 h = cusp_to_infinity_inverse(c);  // h(inf) = c, so g = h^{-1}
  Mat2 st = Mat2::sigma() * Mat2::tau();
  return GroupElement::from_matrix(h * st * h.inverse());
}

Convergents convergents(const Rational& a) {
  Convergents out;
  Int num = boost::multiprecision::numerator(a);
  Int den = boost::multiprecision::denominator(a);
  while (den != 0) {
    Int ak = floor_div(num, den);
    out.partial_quotients.push_back(ak);
    Int r = num - ak * den;
    num = den;
    den = r;
  }
  // p_{-2} = 0, q_{-2} = 1, p_{-1} = 1, q_{-1} = 0
  Int pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
  out.p.push_back(pm1);
  out.q.push_back(qm1);
  for (std::size_t k = 0; k < out.partial_quotients.size(); ++k) {
    const Int& ak = out.partial_quotients[k];
    Int pk = ak * pm1 + pm2;
    Int qk = ak * qm1 + qm2;
    Int sign = (k % 2 == 1) ? 1 : -1;  // (-1)^(k-1)
    out.matrices.emplace_back(pk, sign * pm1, qk, sign * qm1);
    out.p.push_back(pk);
    out.q.push_back(qk);
    pm2 = pm1;
    qm2 = qm1;
    pm1 = pk;
    qm1 = qk;
  }
  return out;
}

}  // namespace itershim::psl2z
