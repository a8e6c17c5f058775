#pragma once

// Exact arithmetic in PSL(2,Z) viewed as the free product Z/2 * Z/3.

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace itershim {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace psl2z {

/// Integer matrix of determinant 1, stored up to sign: the first nonzero
/// entry in row-major order is kept positive, so equality is projective.
class Mat2 {
 public:
  Mat2() : a_(1), b_(0), c_(0), d_(1) {}
  Mat2(Int a, Int b, Int c, Int d);

  static Mat2 identity() { return {}; }
  static Mat2 sigma();
  static Mat2 tau();
  static Mat2 translation(const Int& n);  // z -> z + n

  const Int& a() const { return a_; }
  const Int& b() const { return b_; }
  const Int& c() const { return c_; }
  const Int& d() const { return d_; }

  Mat2 inverse() const;
  Mat2 operator*(const Mat2& o) const;
  bool operator==(const Mat2& o) const = default;

  std::string to_string() const;

 private:
  void normalize_sign();
  Int a_, b_, c_, d_;
};

enum class Token { Sigma, Tau, TauSq };

/// Normal-form word in sigma, tau, tau^2 with alternating sigma / tau-power
/// tokens. The empty word is the identity.
class GroupWord {
 public:
  GroupWord() = default;
  explicit GroupWord(std::vector<Token> tokens);

  /// Parses the compact textual form over {"s", "t", "tt"}, e.g. "sttst".
  static GroupWord parse(const std::string& text);

  const std::vector<Token>& tokens() const { return tokens_; }
  bool empty() const { return tokens_.empty(); }
  int length() const;
  std::string to_string() const;

  bool operator==(const GroupWord&) const = default;
  auto operator<=>(const GroupWord&) const = default;

 private:
  std::vector<Token> tokens_;
};

/// Free-product reduction of an arbitrary token sequence.
GroupWord reduce_tokens(const std::vector<Token>& tokens);

Mat2 token_matrix(Token t);
Mat2 eval_word(const GroupWord& w);
GroupWord normal_form(const Mat2& m);

/// All normal-form words with length <= max_length, shortest first.
std::vector<GroupWord> enumerate_words(int max_length);

struct GroupElement {
  Mat2 mat;
  GroupWord word;

  static GroupElement from_matrix(const Mat2& m) { return {m, normal_form(m)}; }
  static GroupElement from_word(const GroupWord& w) { return {eval_word(w), w}; }
  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;
};

/// Rational cusp p/q in lowest terms with q >= 0; infinity is 1/0.
struct Cusp {
  Int p, q;

  Cusp(Int num, Int den);
  static Cusp infinity() { return Cusp(1, 0); }
  static Cusp from_rational(const Rational& r);
  bool is_infinity() const { return q == 0; }
  Rational value() const;  // throws for infinity
  std::string to_string() const;
  static Cusp parse(const std::string& text);  // "inf", "3/5", "-2"
  bool operator==(const Cusp&) const = default;
};

using Complex = std::complex<double>;
using ExtendedPoint = std::variant<Complex, Cusp>;

ExtendedPoint mobius(const Mat2& m, const ExtendedPoint& p);
Cusp mobius(const Mat2& m, const Cusp& p);
Complex mobius(const Mat2& m, Complex z);

bool is_cusp(const ExtendedPoint& p);
std::string point_to_string(const ExtendedPoint& p);
/// Accepts "i", "rho", "inf", a rational "p/q", or "x+yi" style "x,y".
ExtendedPoint parse_point(const std::string& text);

/// Matrix h with h(infinity) = c, built from the extended Euclid algorithm.
Mat2 cusp_to_infinity_inverse(const Cusp& c);

GroupElement cusp_stabilizer_generator(const Cusp& c);

struct Convergents {
  std::vector<Int> partial_quotients;
  // p[k+1], q[k+1] hold p_k, q_k for k = -1..n.
  std::vector<Int> p, q;
  std::vector<Mat2> matrices;  // g_0..g_n

  int n() const { return static_cast<int>(matrices.size()) - 1; }
};

/// Continued-fraction convergent chain 1/0, p_0/q_0, ..., p_n/q_n = a, with
/// g_k = (p_k, (-1)^(k-1) p_{k-1}; q_k, (-1)^(k-1) q_{k-1}).
Convergents convergents(const Rational& a);

double to_double(const Int& v);

}  // namespace psl2z
}  // namespace itershim
