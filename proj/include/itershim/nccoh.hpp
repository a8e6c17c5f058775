#pragma once

// Noncommutative 1-cocycles of PSL(2,Z) with values in a group N carrying a
// left action by automorphisms: extension from the pair (X, Y), equivalence,
// normalization, cuspidality and Shapiro induction.

#include <concepts>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/ncalg.hpp"
#include "itershim/psl2z.hpp"

namespace itershim::nccoh {

using psl2z::GroupWord;
using psl2z::Mat2;
using psl2z::Token;
using Complex = std::complex<double>;

template <class G>
concept CoefficientGroup = requires(const G& g, const typename G::value_type& a, const Mat2& m) {
  { g.one() } -> std::convertible_to<typename G::value_type>;
  { g.mul(a, a) } -> std::convertible_to<typename G::value_type>;
  { g.inv(a) } -> std::convertible_to<typename G::value_type>;
  { g.act(m, a) } -> std::convertible_to<typename G::value_type>;
  { g.distance(a, a) } -> std::convertible_to<double>;
};

template <class G>
concept GroupWithSqrt = CoefficientGroup<G> && requires(const G& g, const typename G::value_type& a) {
  { g.sqrt(a) } -> std::convertible_to<typename G::value_type>;
};

/// Unital truncated series under concatenation product, with PSL(2,Z)
/// acting through letter maps. The representation is fixed by L(sigma) and
/// L(tau); L(g) for other g is the product along the normal-form word.
template <class S>
class SeriesGroup {
 public:
  using value_type = ncalg::BasicSeries<S>;

  SeriesGroup(ncalg::AlphabetPtr alphabet, int depth, ncalg::LetterMap<S> l_sigma, ncalg::LetterMap<S> l_tau)
      : alphabet_(std::move(alphabet)), depth_(depth), sigma_(std::move(l_sigma)), tau_(std::move(l_tau)) {
    if (sigma_.size() != alphabet_->size() || tau_.size() != alphabet_->size())
      throw std::invalid_argument("SeriesGroup: letter map size does not match alphabet");
  }

  const ncalg::AlphabetPtr& alphabet() const { return alphabet_; }
  int depth() const { return depth_; }

  value_type one() const { return value_type::one(alphabet_, depth_); }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type inv(const value_type& a) const { return ncalg::inverse(a); }
  value_type sqrt(const value_type& a) const { return ncalg::sqrt(a); }
  value_type act(const Mat2& g, const value_type& a) const { return ncalg::apply_letter_map(letter_map(g), a); }
  double distance(const value_type& a, const value_type& b) const { return ncalg::scaled_diff(a, b); }

  const ncalg::LetterMap<S>& letter_map(const Mat2& g) const {
    auto key = g.to_string();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto l = ncalg::LetterMap<S>::identity(alphabet_->size());
    const GroupWord word = psl2z::normal_form(g);
    for (Token t : word.tokens()) {
      if (t == Token::Sigma) l = l * sigma_;
      else if (t == Token::Tau) l = l * tau_;
      else l = l * tau_ * tau_;
    }
    return cache_.emplace(key, std::move(l)).first->second;
  }

 private:
  ncalg::AlphabetPtr alphabet_;
  int depth_;
  ncalg::LetterMap<S> sigma_, tau_;
  mutable std::map<std::string, ncalg::LetterMap<S>> cache_;
};

struct RelationResiduals {
  double sigma = 0.0;  // |X sigma(X) - 1|
  double tau = 0.0;    // |Y tau(Y) tau^2(Y) - 1|
  double max() const { return std::max(sigma, tau); }
};

template <CoefficientGroup G>
RelationResiduals relation_residuals(const G& grp, const typename G::value_type& x, const typename G::value_type& y) {
  const Mat2 s = Mat2::sigma(), t = Mat2::tau();
  RelationResiduals r;
  r.sigma = grp.distance(grp.mul(x, grp.act(s, x)), grp.one());
  r.tau = grp.distance(grp.mul(grp.mul(y, grp.act(t, y)), grp.act(t * t, y)), grp.one());
  return r;
}

/// A cocycle u: PSL(2,Z) -> N determined by X = u(sigma), Y = u(tau),
/// evaluated along normal-form words by u(h s) = u(h) h(u(s)).
template <CoefficientGroup G>
class Cocycle {
 public:
  using value_type = typename G::value_type;

  Cocycle(std::shared_ptr<const G> group, value_type x, value_type y)
      : group_(std::move(group)), x_(std::move(x)), y_(std::move(y)) {}

  const G& group() const { return *group_; }
  std::shared_ptr<const G> group_ptr() const { return group_; }
  const value_type& X() const { return x_; }
  const value_type& Y() const { return y_; }

  value_type operator()(const GroupWord& w) const {
    const auto& toks = w.tokens();
    value_type u = group_->one();
    Mat2 h;
    std::vector<Token> prefix;
    for (Token t : toks) {
      prefix.push_back(t);
      std::string key = GroupWord(prefix).to_string();
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        u = it->second;
      } else if (t == Token::Sigma) {
        u = group_->mul(u, group_->act(h, x_));
      } else {
        u = group_->mul(u, group_->act(h, y_));
        if (t == Token::TauSq) u = group_->mul(u, group_->act(h * Mat2::tau(), y_));
      }
      h = h * psl2z::token_matrix(t);
      if (it == cache_.end()) cache_.emplace(std::move(key), u);
    }
    return u;
  }
  value_type operator()(const Mat2& g) const { return (*this)(psl2z::normal_form(g)); }

  RelationResiduals relations() const { return relation_residuals(*group_, x_, y_); }

 private:
  std::shared_ptr<const G> group_;
  value_type x_, y_;
  mutable std::map<std::string, value_type> cache_;
};

/// Builds the cocycle after checking the Shimura-Eichler relations.
template <CoefficientGroup G>
Cocycle<G> cocycle_from_pair(std::shared_ptr<const G> group, typename G::value_type x, typename G::value_type y,
                             double tol = 1e-6) {
  auto r = relation_residuals(*group, x, y);
  if (!(r.max() <= tol))
    throw std::domain_error("cocycle_from_pair: relations violated (sigma residual " + std::to_string(r.sigma) +
                            ", tau residual " + std::to_string(r.tau) + ")");
  return Cocycle<G>(std::move(group), std::move(x), std::move(y));
}

/// max |u(gh) - u(g) g(u(h))| over the pairs; u is any callable on Mat2.
template <CoefficientGroup G, class U>
double verify_cocycle(const G& grp, const U& u, const std::vector<std::pair<Mat2, Mat2>>& pairs) {
  double worst = 0.0;
  for (const auto& [g, h] : pairs)
    worst = std::max(worst, grp.distance(u(g * h), grp.mul(u(g), grp.act(g, u(h)))));
  return worst;
}

/// max |u2(g) - n^{-1} u(g) g(n)| over the given elements.
template <CoefficientGroup G, class U1, class U2>
double equivalent(const G& grp, const U1& u, const U2& u2, const typename G::value_type& n,
                  const std::vector<Mat2>& elements) {
  const auto n_inv = grp.inv(n);
  double worst = 0.0;
  for (const auto& g : elements)
    worst = std::max(worst, grp.distance(u2(g), grp.mul(grp.mul(n_inv, u(g)), grp.act(g, n))));
  return worst;
}

/// The pair (n^{-1} X sigma(n), n^{-1} Y tau(n)) of the equivalent cocycle.
template <CoefficientGroup G>
Cocycle<G> twist(const Cocycle<G>& u, const typename G::value_type& n) {
  const auto& grp = u.group();
  auto n_inv = grp.inv(n);
  auto x = grp.mul(grp.mul(n_inv, u.X()), grp.act(Mat2::sigma(), n));
  auto y = grp.mul(grp.mul(n_inv, u.Y()), grp.act(Mat2::tau(), n));
  return Cocycle<G>(u.group_ptr(), std::move(x), std::move(y));
}

template <CoefficientGroup G>
struct Normalized {
  Cocycle<G> cocycle;
  typename G::value_type witness;
};

/// Equivalent cocycle with value 1 at sigma, witness n = X^{1/2}.
template <GroupWithSqrt G>
Normalized<G> normalize_sigma(const Cocycle<G>& u) {
  auto n = u.group().sqrt(u.X());
  return {twist(u, n), n};
}

/// Elements used when comparing two cocycles: all normal-form words up to
/// the given length.
std::vector<Mat2> test_elements(int max_length);
/// Deterministic random pairs of words of length <= max_length.
std::vector<std::pair<Mat2, Mat2>> random_pairs(int count, int max_length, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cuspidality: a witness n with u(sigma tau) = n^{-1} (sigma tau)(n), solved
// one depth layer at a time:
//   (L^{(x)d} - I) n_d = c_d + sum_{0<|u|<d} n_u c_v,  c = u(sigma tau).

struct CuspidalityReport {
  bool cuspidal = false;
  int depth_checked = 0;
  int obstruction_depth = -1;  // first inconsistent layer, -1 when none
  std::vector<double> layer_residuals;  // relative residual per layer (index = depth)
  double threshold = 1e-6;
  nlohmann::ordered_json to_json() const;
};

struct ComplexCuspidality {
  CuspidalityReport report;
  ncalg::Series witness;  // valid through depth_checked
};
struct ExactCuspidality {
  CuspidalityReport report;
  ncalg::ExactSeries witness;
};

/// c is the value u(sigma tau), l the letter map of sigma tau.
ComplexCuspidality solve_cuspidal(const ncalg::Series& c, const ncalg::LetterMap<Complex>& l, double threshold = 1e-6);
ExactCuspidality solve_cuspidal(const ncalg::ExactSeries& c, const ncalg::LetterMap<Rational>& l);

template <class S>
auto is_cuspidal(const Cocycle<SeriesGroup<S>>& u) {
  const Mat2 st = Mat2::sigma() * Mat2::tau();
  return solve_cuspidal(u(st), u.group().letter_map(st));
}

// ---------------------------------------------------------------------------
// Shapiro induction from a finite-index subgroup Gamma.

struct CosetSystem {
  std::vector<Mat2> reps;                       // reps[0] = identity
  std::function<bool(const Mat2&)> contains;    // membership in Gamma

  /// Checks h_1 = 1, pairwise distinct cosets Gamma h_i, and closure of the
  /// union under right multiplication by sigma and tau. Throws otherwise.
  void validate() const;
  /// (gamma, k) with x = gamma h_k.
  std::pair<Mat2, std::size_t> decompose(const Mat2& x) const;
  std::size_t index() const { return reps.size(); }
};

/// Image of the principal congruence subgroup of level 2 with
/// representatives 1, sigma, tau, tau^2, sigma tau, tau sigma.
CosetSystem gamma2_cosets();
CosetSystem trivial_cosets();

/// The induced module: Gamma-covariant maps phi on PSL(2,Z), stored by their
/// values on the representatives. Product is pointwise, the action is
/// (x phi)(h) = phi(h x).
template <CoefficientGroup G>
class InducedGroup {
 public:
  using base_value = typename G::value_type;
  using value_type = std::vector<base_value>;

  InducedGroup(std::shared_ptr<const G> base, CosetSystem cosets) : base_(std::move(base)), cosets_(std::move(cosets)) {
    cosets_.validate();
  }

  const G& base() const { return *base_; }
  const CosetSystem& cosets() const { return cosets_; }

  value_type one() const { return value_type(cosets_.index(), base_->one()); }
  value_type mul(const value_type& a, const value_type& b) const {
    value_type r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = base_->mul(a[i], b[i]);
    return r;
  }
  value_type inv(const value_type& a) const {
    value_type r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = base_->inv(a[i]);
    return r;
  }
  /// phi(h) for arbitrary h, using phi(gamma h_k) = gamma phi(h_k).
  base_value evaluate(const value_type& phi, const Mat2& h) const {
    auto [gamma, k] = cosets_.decompose(h);
    return base_->act(gamma, phi[k]);
  }
  value_type act(const Mat2& x, const value_type& phi) const {
    value_type r(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) r[i] = evaluate(phi, cosets_.reps[i] * x);
    return r;
  }
  double distance(const value_type& a, const value_type& b) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, base_->distance(a[i], b[i]));
    return worst;
  }

 private:
  std::shared_ptr<const G> base_;
  CosetSystem cosets_;
};

/// The induced cocycle: u~(x)(h_j) = u(gamma) where h_j x = gamma h_k.
/// u is a cocycle on Gamma given as a callable on Gamma's elements.
template <CoefficientGroup G>
class InducedCocycle {
 public:
  using value_type = typename InducedGroup<G>::value_type;

  InducedCocycle(std::shared_ptr<const InducedGroup<G>> group, std::function<typename G::value_type(const Mat2&)> u)
      : group_(std::move(group)), u_(std::move(u)) {}

  const InducedGroup<G>& group() const { return *group_; }

  value_type operator()(const Mat2& x) const {
    const auto& cs = group_->cosets();
    value_type r(cs.index());
    for (std::size_t j = 0; j < cs.index(); ++j) r[j] = u_(cs.decompose(cs.reps[j] * x).first);
    return r;
  }
  value_type operator()(const GroupWord& w) const { return (*this)(psl2z::eval_word(w)); }

  /// phi -> phi(1) applied to u~(gamma).
  typename G::value_type project(const Mat2& gamma) const { return (*this)(gamma)[0]; }

 private:
  std::shared_ptr<const InducedGroup<G>> group_;
  std::function<typename G::value_type(const Mat2&)> u_;
};

template <CoefficientGroup G>
InducedCocycle<G> shapiro_induce(std::shared_ptr<const G> base, CosetSystem cosets,
                                 std::function<typename G::value_type(const Mat2&)> u) {
  auto grp = std::make_shared<const InducedGroup<G>>(std::move(base), std::move(cosets));
  return InducedCocycle<G>(std::move(grp), std::move(u));
}

}  // namespace itershim::nccoh
