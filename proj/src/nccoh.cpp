#include "itershim/nccoh.hpp"

#include <random>

#include <Eigen/Dense>

#include "itershim/linalg.hpp"

namespace itershim::nccoh {

std::vector<Mat2> test_elements(int max_length) {
  std::vector<Mat2> out;
  for (const auto& w : psl2z::enumerate_words(max_length)) out.push_back(psl2z::eval_word(w));
  return out;
}

std::vector<std::pair<Mat2, Mat2>> random_pairs(int count, int max_length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(0, max_length), pick(0, 2);
  auto random_element = [&] {
    Mat2 m;
    for (int i = len(rng); i > 0; --i) {
      int t = pick(rng);
      m = m * (t == 0 ? Mat2::sigma() : t == 1 ? Mat2::tau() : Mat2::tau() * Mat2::tau());
    }
    return m;
  };
  std::vector<std::pair<Mat2, Mat2>> out;
  for (int i = 0; i < count; ++i) {
    Mat2 g = random_element();
    out.emplace_back(g, random_element());
  }
  return out;
}

nlohmann::ordered_json CuspidalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["cuspidal"] = cuspidal;
  j["depth_checked"] = depth_checked;
  j["obstruction_depth"] = obstruction_depth >= 0 ? nlohmann::ordered_json(obstruction_depth) : nlohmann::ordered_json();
  j["layer_residuals"] = layer_residuals;
  j["threshold"] = threshold;
  return j;
}

namespace {

// Entry (w, w') of L^{(x)d} for words given by flat layer indices.
template <class S>
S kron_entry(const ncalg::LetterMap<S>& l, std::size_t w, std::size_t wp, int d) {
  const std::size_t k = static_cast<std::size_t>(l.size());
  S prod = S(1);
  for (int i = 0; i < d; ++i) {
    prod *= l(static_cast<int>(w % k), static_cast<int>(wp % k));
    if (prod == S(0)) return prod;
    w /= k;
    wp /= k;
  }
  return prod;
}

// Right-hand side c_d + sum_{0<|u|<d} n_u c_v, with n known below depth d.
template <class S>
std::vector<S> layer_rhs(const ncalg::BasicSeries<S>& n, const ncalg::BasicSeries<S>& c, int d) {
  ncalg::BasicSeries<S> prod = n * c;
  std::vector<S> b(prod.layer_size(d));
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = prod[prod.layer_offset(d) + i];
  return b;
}

}  // namespace

ComplexCuspidality solve_cuspidal(const ncalg::Series& c, const ncalg::LetterMap<Complex>& l, double threshold) {
  ncalg::require_unital(c, "is_cuspidal");
  ComplexCuspidality out;
  out.report.threshold = threshold;
  out.report.layer_residuals.push_back(0.0);
  out.witness = ncalg::Series::one(c.alphabet(), c.depth());
  for (int d = 1; d <= c.depth(); ++d) {
    auto b = layer_rhs(out.witness, c, d);
    const Eigen::Index dim = static_cast<Eigen::Index>(b.size());
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      for (Eigen::Index j = 0; j < dim; ++j)
        a(i, j) = kron_entry(l, static_cast<std::size_t>(i), static_cast<std::size_t>(j), d) - (i == j ? 1.0 : 0.0);
    Eigen::VectorXcd rhs(dim);
    for (Eigen::Index i = 0; i < dim; ++i) rhs(i) = b[static_cast<std::size_t>(i)];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::VectorXcd x = qr.solve(rhs);
    double res = (a * x - rhs).norm() / std::max(1.0, rhs.norm());
    out.report.layer_residuals.push_back(res);
    out.report.depth_checked = d;
    if (!(res < threshold)) {
      out.report.obstruction_depth = d;
      return out;
    }
    const std::size_t off = out.witness.layer_offset(d);
    for (Eigen::Index i = 0; i < dim; ++i) out.witness[off + static_cast<std::size_t>(i)] = x(i);
  }
  out.report.cuspidal = true;
  return out;
}

ExactCuspidality solve_cuspidal(const ncalg::ExactSeries& c, const ncalg::LetterMap<Rational>& l) {
  ncalg::require_unital(c, "is_cuspidal");
  ExactCuspidality out;
  out.report.threshold = 0.0;
  out.report.layer_residuals.push_back(0.0);
  out.witness = ncalg::ExactSeries::one(c.alphabet(), c.depth());
  for (int d = 1; d <= c.depth(); ++d) {
    auto b = layer_rhs(out.witness, c, d);
    const std::size_t dim = b.size();
    auto a = linalg::zeros(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) a[i][j] = kron_entry(l, i, j, d) - (i == j ? Rational(1) : Rational(0));
    auto x = linalg::solve(a, b, dim);
    out.report.depth_checked = d;
    if (!x) {
      out.report.layer_residuals.push_back(1.0);
      out.report.obstruction_depth = d;
      return out;
    }
    out.report.layer_residuals.push_back(0.0);
    const std::size_t off = out.witness.layer_offset(d);
    for (std::size_t i = 0; i < dim; ++i) out.witness[off + i] = (*x)[i];
  }
  out.report.cuspidal = true;
  return out;
}

void CosetSystem::validate() const {
  if (reps.empty() || !(reps[0] == Mat2::identity()))
    throw std::invalid_argument("coset system: first representative must be the identity");
  if (!contains) throw std::invalid_argument("coset system: missing membership test");
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      if (contains(reps[i] * reps[j].inverse()))
        throw std::invalid_argument("coset system: representatives " + std::to_string(i) + " and " +
                                    std::to_string(j) + " lie in the same coset");
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (const Mat2& s : {Mat2::sigma(), Mat2::tau()}) {
      Mat2 x = reps[i] * s;
      bool found = false;
      for (const auto& h : reps) found = found || contains(x * h.inverse());
      if (!found) throw std::invalid_argument("coset system: representatives do not cover PSL(2,Z)");
    }
}

std::pair<Mat2, std::size_t> CosetSystem::decompose(const Mat2& x) const {
  for (std::size_t k = 0; k < reps.size(); ++k) {
    Mat2 gamma = x * reps[k].inverse();
    if (contains(gamma)) return {gamma, k};
  }
  throw std::domain_error("coset system: element " + x.to_string() + " not covered");
}

CosetSystem gamma2_cosets() {
  const Mat2 s = Mat2::sigma(), t = Mat2::tau();
  CosetSystem cs;
  cs.reps = {Mat2::identity(), s, t, t * t, s * t, t * s};
  cs.contains = [](const Mat2& m) {
    auto odd = [](const Int& v) { return (v % 2) != 0; };
    return odd(m.a()) && odd(m.d()) && !odd(m.b()) && !odd(m.c());
  };
  return cs;
}

CosetSystem trivial_cosets() {
  CosetSystem cs;
  cs.reps = {Mat2::identity()};
  cs.contains = [](const Mat2&) { return true; };
  return cs;
}

}  // namespace itershim::nccoh
