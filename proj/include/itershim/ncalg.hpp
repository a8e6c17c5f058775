#pragma once

// Truncated noncommutative formal series C<<A_v>> / (words longer than D).
//
// Storage is dense and word-indexed: a word v_1...v_l over an alphabet of n
// letters lives at offset(l) + sum_i v_i n^(l-i), so every depth layer is a
// contiguous tensor of shape n^l.  The left-most letter is the most
// significant index.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace itershim::ncalg {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;
using Word = std::vector<int>;

inline constexpr int kMaxDepth = 5;
inline constexpr int kDefaultDepth = 3;

class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> letters) : letters_(std::move(letters)) {
    for (std::size_t i = 0; i < letters_.size(); ++i)
      for (std::size_t j = i + 1; j < letters_.size(); ++j)
        if (letters_[i] == letters_[j])
          throw std::invalid_argument("Alphabet: duplicate letter '" + letters_[i] + "'");
  }

  int size() const { return static_cast<int>(letters_.size()); }
  const std::string& operator[](int i) const { return letters_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& letters() const { return letters_; }
  int index_of(const std::string& letter) const {
    auto it = std::find(letters_.begin(), letters_.end(), letter);
    if (it == letters_.end()) throw std::out_of_range("Alphabet: unknown letter '" + letter + "'");
    return static_cast<int>(it - letters_.begin());
  }
  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> letters_;
};

using AlphabetPtr = std::shared_ptr<const Alphabet>;

inline AlphabetPtr make_alphabet(std::vector<std::string> letters) {
  return std::make_shared<const Alphabet>(std::move(letters));
}

inline double magnitude(const Complex& z) { return std::abs(z); }
inline double magnitude(const Rational& r) { return boost::multiprecision::abs(r).convert_to<double>(); }

inline bool is_zero(const Complex& z) { return z == Complex(0.0, 0.0); }
inline bool is_zero(const Rational& r) { return r == 0; }

/// Square matrix over the alphabet: the substitution A_v -> sum_w L(w, v) A_w.
template <class S>
class LetterMap {
 public:
  LetterMap() = default;
  explicit LetterMap(int n) : n_(n), m_(static_cast<std::size_t>(n) * n, S(0)) {}

  static LetterMap identity(int n) {
    LetterMap l(n);
    for (int i = 0; i < n; ++i) l(i, i) = S(1);
    return l;
  }

  int size() const { return n_; }
  S& operator()(int row, int col) { return m_[static_cast<std::size_t>(row) * n_ + col]; }
  const S& operator()(int row, int col) const { return m_[static_cast<std::size_t>(row) * n_ + col]; }

  LetterMap operator*(const LetterMap& o) const {
    if (n_ != o.n_) throw std::invalid_argument("LetterMap: size mismatch");
    LetterMap r(n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        const S& x = (*this)(i, k);
        if (is_zero(x)) continue;
        for (int j = 0; j < n_; ++j) r(i, j) += x * o(k, j);
      }
    return r;
  }

  LetterMap transpose() const {
    LetterMap r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  bool operator==(const LetterMap&) const = default;

 private:
  int n_ = 0;
  std::vector<S> m_;
};

/// Converts an exact letter map to floating point.
inline LetterMap<Complex> to_complex(const LetterMap<Rational>& l) {
  LetterMap<Complex> r(l.size());
  for (int i = 0; i < l.size(); ++i)
    for (int j = 0; j < l.size(); ++j) r(i, j) = Complex(l(i, j).convert_to<double>(), 0.0);
  return r;
}

template <class S>
class BasicSeries {
 public:
  using scalar_type = S;

  BasicSeries() = default;
  BasicSeries(AlphabetPtr alphabet, int depth) : alphabet_(std::move(alphabet)), depth_(depth) {
    if (!alphabet_) throw std::invalid_argument("BasicSeries: null alphabet");
    if (depth_ < 0 || depth_ > kMaxDepth)
      throw std::invalid_argument("BasicSeries: depth must lie in [0, " + std::to_string(kMaxDepth) + "]");
    n_ = alphabet_->size();
    offsets_.resize(static_cast<std::size_t>(depth_) + 2);
    std::size_t off = 0, pw = 1;
    for (int l = 0; l <= depth_ + 1; ++l) {
      offsets_[static_cast<std::size_t>(l)] = off;
      off += pw;
      pw *= static_cast<std::size_t>(n_);
    }
    coeffs_.assign(offsets_.back(), S(0));
  }

  static BasicSeries one(AlphabetPtr alphabet, int depth) {
    BasicSeries s(std::move(alphabet), depth);
    s.coeffs_[0] = S(1);
    return s;
  }

  static BasicSeries letter(AlphabetPtr alphabet, int depth, int v, S c = S(1)) {
    BasicSeries s(std::move(alphabet), depth);
    if (depth >= 1) s.coeffs_[s.index(Word{v})] = c;
    return s;
  }

  const AlphabetPtr& alphabet() const { return alphabet_; }
  int depth() const { return depth_; }
  int letters() const { return n_; }
  std::size_t size() const { return coeffs_.size(); }

  std::size_t layer_offset(int l) const { return offsets_.at(static_cast<std::size_t>(l)); }
  std::size_t layer_size(int l) const { return offsets_.at(static_cast<std::size_t>(l) + 1) - offsets_.at(static_cast<std::size_t>(l)); }

  std::size_t index(const Word& w) const {
    if (static_cast<int>(w.size()) > depth_) throw std::out_of_range("BasicSeries: word longer than depth");
    std::size_t idx = 0;
    for (int v : w) {
      if (v < 0 || v >= n_) throw std::out_of_range("BasicSeries: letter index out of range");
      idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
    }
    return offsets_[w.size()] + idx;
  }

  Word word_at(std::size_t flat) const {
    int l = 0;
    while (flat >= offsets_[static_cast<std::size_t>(l) + 1]) ++l;
    std::size_t idx = flat - offsets_[static_cast<std::size_t>(l)];
    Word w(static_cast<std::size_t>(l));
    for (int i = l - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(n_));
      idx /= static_cast<std::size_t>(n_);
    }
    return w;
  }

  std::string word_string(const Word& w) const {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) s += ' ';
      s += (*alphabet_)[w[i]];
    }
    return s;
  }

  S& operator[](std::size_t flat) { return coeffs_[flat]; }
  const S& operator[](std::size_t flat) const { return coeffs_[flat]; }
  S& at(const Word& w) { return coeffs_[index(w)]; }
  const S& at(const Word& w) const { return coeffs_[index(w)]; }
  const std::vector<S>& coefficients() const { return coeffs_; }

  bool is_unital() const { return !coeffs_.empty() && coeffs_[0] == S(1); }

  void check_compatible(const BasicSeries& o) const {
    if (depth_ != o.depth_ || !(*alphabet_ == *o.alphabet_))
      throw std::invalid_argument("BasicSeries: alphabet or depth mismatch");
  }

  BasicSeries& operator+=(const BasicSeries& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  BasicSeries& operator-=(const BasicSeries& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  BasicSeries& operator*=(const S& c) {
    for (auto& x : coeffs_) x *= c;
    return *this;
  }
  friend BasicSeries operator+(BasicSeries a, const BasicSeries& b) { return a += b; }
  friend BasicSeries operator-(BasicSeries a, const BasicSeries& b) { return a -= b; }
  friend BasicSeries operator*(BasicSeries a, const S& c) { return a *= c; }
  friend BasicSeries operator*(const S& c, BasicSeries a) { return a *= c; }

  /// Concatenation product truncated at the common depth.
  friend BasicSeries operator*(const BasicSeries& f, const BasicSeries& g) {
    f.check_compatible(g);
    BasicSeries r(f.alphabet_, f.depth_);
    const std::size_t n = static_cast<std::size_t>(f.n_);
    for (int lu = 0; lu <= f.depth_; ++lu) {
      const std::size_t fu_off = f.offsets_[static_cast<std::size_t>(lu)];
      const std::size_t fu_cnt = f.layer_size(lu);
      for (int lv = 0; lu + lv <= f.depth_; ++lv) {
        const std::size_t gv_off = g.offsets_[static_cast<std::size_t>(lv)];
        const std::size_t gv_cnt = g.layer_size(lv);
        const std::size_t r_off = r.offsets_[static_cast<std::size_t>(lu + lv)];
        std::size_t stride = 1;
        for (int k = 0; k < lv; ++k) stride *= n;
        for (std::size_t iu = 0; iu < fu_cnt; ++iu) {
          const S& fu = f.coeffs_[fu_off + iu];
          if (is_zero(fu)) continue;
          S* out = &r.coeffs_[r_off + iu * stride];
          const S* gin = &g.coeffs_[gv_off];
          for (std::size_t iv = 0; iv < gv_cnt; ++iv) out[iv] += fu * gin[iv];
        }
      }
    }
    return r;
  }

  /// Part of depth >= 1 (drops the empty-word coefficient).
  BasicSeries augmentation_part() const {
    BasicSeries r = *this;
    r.coeffs_[0] = S(0);
    return r;
  }

  /// Keeps only the layer of the given depth.
  BasicSeries layer(int l) const {
    BasicSeries r(alphabet_, depth_);
    for (std::size_t i = layer_offset(l); i < layer_offset(l) + layer_size(l); ++i) r.coeffs_[i] = coeffs_[i];
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : coeffs_) m = std::max(m, magnitude(x));
    return m;
  }

 private:
  AlphabetPtr alphabet_;
  int depth_ = 0;
  int n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<S> coeffs_;
};

using Series = BasicSeries<Complex>;
using ExactSeries = BasicSeries<Rational>;

template <class S>
double max_abs_diff(const BasicSeries<S>& a, const BasicSeries<S>& b) {
  a.check_compatible(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, magnitude(S(a[i] - b[i])));
  return m;
}

/// max |a_w - b_w| / max(1, |a|_inf, |b|_inf): absolute for small series,
/// relative once coefficients grow large.
template <class S>
double scaled_diff(const BasicSeries<S>& a, const BasicSeries<S>& b) {
  double scale = std::max({1.0, a.max_abs(), b.max_abs()});
  return max_abs_diff(a, b) / scale;
}

template <class S>
void require_unital(const BasicSeries<S>& f, const char* op) {
  if (!f.is_unital()) throw std::invalid_argument(std::string(op) + ": series is not unital");
}

template <class S>
BasicSeries<S> inverse(const BasicSeries<S>& f) {
  require_unital(f, "inverse");
  // (1 + R)^{-1} = sum_j (-R)^j, finite because R has no constant term.
  BasicSeries<S> minus_r = f.augmentation_part() * S(-1);
  BasicSeries<S> term = BasicSeries<S>::one(f.alphabet(), f.depth());
  BasicSeries<S> acc = term;
  for (int j = 1; j <= f.depth(); ++j) {
    term = term * minus_r;
    acc += term;
  }
  return acc;
}

/// Unique unital square root, solved layer by layer.
template <class S>
BasicSeries<S> sqrt(const BasicSeries<S>& f) {
  require_unital(f, "sqrt");
  BasicSeries<S> g = BasicSeries<S>::one(f.alphabet(), f.depth());
  for (int d = 1; d <= f.depth(); ++d) {
    BasicSeries<S> sq = g * g;
    for (std::size_t i = f.layer_offset(d); i < f.layer_offset(d) + f.layer_size(d); ++i)
      g[i] = (f[i] - sq[i]) / S(2);
  }
  return g;
}

template <class S>
BasicSeries<S> log(const BasicSeries<S>& f) {
  require_unital(f, "log");
  BasicSeries<S> r = f.augmentation_part();
  BasicSeries<S> power = r;
  BasicSeries<S> acc(f.alphabet(), f.depth());
  for (int j = 1; j <= f.depth(); ++j) {
    S c = S((j % 2 == 1) ? 1 : -1) / S(j);
    acc += power * c;
    power = power * r;
  }
  return acc;
}

template <class S>
BasicSeries<S> exp(const BasicSeries<S>& l) {
  if (!is_zero(l[0])) throw std::invalid_argument("exp: argument must have zero constant term");
  BasicSeries<S> term = BasicSeries<S>::one(l.alphabet(), l.depth());
  BasicSeries<S> acc = term;
  for (int j = 1; j <= l.depth(); ++j) {
    term = term * l;
    term *= S(1) / S(j);
    acc += term;
  }
  return acc;
}

/// Applies the algebra automorphism induced by A_v -> sum_w L(w, v) A_w.
template <class S>
BasicSeries<S> apply_letter_map(const LetterMap<S>& l, const BasicSeries<S>& f) {
  const int n = f.letters();
  if (l.size() != n) throw std::invalid_argument("apply_letter_map: size mismatch");
  BasicSeries<S> r = f;
  std::vector<S> buf;
  for (int d = 1; d <= f.depth(); ++d) {
    const std::size_t off = f.layer_offset(d);
    const std::size_t total = f.layer_size(d);
    for (int axis = 0; axis < d; ++axis) {
      std::size_t inner = 1;
      for (int k = axis + 1; k < d; ++k) inner *= static_cast<std::size_t>(n);
      const std::size_t outer = total / (inner * static_cast<std::size_t>(n));
      buf.assign(total, S(0));
      for (std::size_t p = 0; p < outer; ++p)
        for (int v = 0; v < n; ++v)
          for (std::size_t s = 0; s < inner; ++s) {
            const S& x = r[off + (p * n + v) * inner + s];
            if (is_zero(x)) continue;
            for (int u = 0; u < n; ++u) {
              const S& c = l(u, v);
              if (is_zero(c)) continue;
              buf[(p * n + u) * inner + s] += c * x;
            }
          }
      for (std::size_t i = 0; i < total; ++i) r[off + i] = buf[i];
    }
  }
  return r;
}

namespace detail {

// Bit masks of length lu+lv with exactly lu bits set: positions taken from u.
inline std::vector<unsigned> shuffle_masks(int lu, int lv) {
  std::vector<unsigned> out;
  const int l = lu + lv;
  for (unsigned m = 0; m < (1u << l); ++m)
    if (std::popcount(m) == lu) out.push_back(m);
  return out;
}

inline std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace detail

/// Max over word pairs (u, v), |u|,|v| >= 1, |u| + |v| <= D, of
/// |F(u) F(v) - sum_{w in u sh v} F(w)|. With relative = true each defect is
/// divided by max(1, |F(u)||F(v)| + sum |F(w)|), which is what matters once
/// letter maps with large entries have been applied.
template <class S>
double grouplike_residual(const BasicSeries<S>& f, bool relative = false) {
  const int n = f.letters();
  const std::size_t nn = static_cast<std::size_t>(n);
  double worst = 0.0;
  for (int lu = 1; lu < f.depth(); ++lu)
    for (int lv = 1; lu + lv <= f.depth(); ++lv) {
      const auto masks = detail::shuffle_masks(lu, lv);
      const int l = lu + lv;
      const std::size_t cu = detail::ipow(nn, lu), cv = detail::ipow(nn, lv);
      std::vector<int> u(static_cast<std::size_t>(lu)), v(static_cast<std::size_t>(lv));
      for (std::size_t iu = 0; iu < cu; ++iu) {
        std::size_t t = iu;
        for (int i = lu - 1; i >= 0; --i) {
          u[static_cast<std::size_t>(i)] = static_cast<int>(t % nn);
          t /= nn;
        }
        const S& fu = f[f.layer_offset(lu) + iu];
        for (std::size_t iv = 0; iv < cv; ++iv) {
          std::size_t s = iv;
          for (int i = lv - 1; i >= 0; --i) {
            v[static_cast<std::size_t>(i)] = static_cast<int>(s % nn);
            s /= nn;
          }
          S acc = S(0);
          double scale = 0.0;
          for (unsigned m : masks) {
            std::size_t idx = 0;
            int pu = 0, pv = 0;
            for (int pos = l - 1; pos >= 0; --pos) {
              int letter = (m >> pos) & 1u ? u[static_cast<std::size_t>(pu++)] : v[static_cast<std::size_t>(pv++)];
              idx = idx * nn + static_cast<std::size_t>(letter);
            }
            acc += f[f.layer_offset(l) + idx];
            if (relative) scale += magnitude(f[f.layer_offset(l) + idx]);
          }
          S diff = fu * f[f.layer_offset(lv) + iv] - acc;
          double d = magnitude(diff);
          if (relative) d /= std::max(1.0, magnitude(fu) * magnitude(f[f.layer_offset(lv) + iv]) + scale);
          worst = std::max(worst, d);
        }
      }
    }
  return worst;
}

/// Same condition as grouplike_residual, but computed by expanding the
/// coproduct Delta(F) = sum_w F(w) sum_{I subset positions} w_I (x) w_{I^c}
/// word by word and comparing with F (x) F.  Exponential in the depth; meant
/// as a cross-check for small depth.
template <class S>
double coproduct_residual(const BasicSeries<S>& f) {
  const int n = f.letters();
  const std::size_t nn = static_cast<std::size_t>(n);
  const int depth = f.depth();
  // table[lu][lv] is a dense n^lu x n^lv block of Delta(F).
  std::vector<std::vector<std::vector<S>>> table(static_cast<std::size_t>(depth) + 1);
  for (int lu = 0; lu <= depth; ++lu) {
    table[static_cast<std::size_t>(lu)].resize(static_cast<std::size_t>(depth - lu) + 1);
    for (int lv = 0; lu + lv <= depth; ++lv)
      table[static_cast<std::size_t>(lu)][static_cast<std::size_t>(lv)].assign(
          detail::ipow(nn, lu) * detail::ipow(nn, lv), S(0));
  }
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const S& c = f[flat];
    if (is_zero(c)) continue;
    const Word w = f.word_at(flat);
    const int l = static_cast<int>(w.size());
    for (unsigned m = 0; m < (1u << l); ++m) {
      std::size_t iu = 0, iv = 0;
      int lu = 0;
      for (int pos = 0; pos < l; ++pos) {
        if ((m >> (l - 1 - pos)) & 1u) {
          iu = iu * nn + static_cast<std::size_t>(w[static_cast<std::size_t>(pos)]);
          ++lu;
        } else {
          iv = iv * nn + static_cast<std::size_t>(w[static_cast<std::size_t>(pos)]);
        }
      }
      const int lv = l - lu;
      table[static_cast<std::size_t>(lu)][static_cast<std::size_t>(lv)][iu * detail::ipow(nn, lv) + iv] += c;
    }
  }
  double worst = 0.0;
  for (int lu = 0; lu <= depth; ++lu)
    for (int lv = 0; lu + lv <= depth; ++lv) {
      const auto& block = table[static_cast<std::size_t>(lu)][static_cast<std::size_t>(lv)];
      const std::size_t cv = detail::ipow(nn, lv);
      for (std::size_t iu = 0; iu < detail::ipow(nn, lu); ++iu)
        for (std::size_t iv = 0; iv < cv; ++iv) {
          S diff = f[f.layer_offset(lu) + iu] * f[f.layer_offset(lv) + iv] - block[iu * cv + iv];
          worst = std::max(worst, magnitude(diff));
        }
    }
  return worst;
}

inline Series to_complex(const ExactSeries& e) {
  Series s(e.alphabet(), e.depth());
  for (std::size_t i = 0; i < e.size(); ++i) s[i] = Complex(e[i].convert_to<double>(), 0.0);
  return s;
}

nlohmann::ordered_json to_json(const Series& s);
Series series_from_json(const nlohmann::ordered_json& j);

}  // namespace itershim::ncalg
