#include "itershim/synthetic.hpp"

#include "itershim/forms.hpp"

namespace itershim::synthetic {

using psl2z::Mat2;

std::shared_ptr<const ExactGroup> weight4_group(int depth) {
  auto alpha = ncalg::make_alphabet({"A1", "A2", "A3"});
  return std::make_shared<const ExactGroup>(alpha, depth, forms::monomial_pullback(Mat2::sigma(), 4).transpose(),
                                            forms::monomial_pullback(Mat2::tau(), 4).transpose());
}

ncalg::ExactSeries random_element(const ExactGroup& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
  ncalg::ExactSeries s = g.one();
  for (std::size_t i = 1; i < s.size(); ++i) s[i] = Rational(num(rng), den(rng));
  return s;
}

ncalg::ExactSeries coboundary_part(const ExactGroup& g, const ncalg::ExactSeries& n, const Mat2& x) {
  return g.mul(g.inv(n), g.act(x, n));
}

ExactCocycle genuine_pair(std::shared_ptr<const ExactGroup> g, const ncalg::ExactSeries& n,
                          const ncalg::ExactSeries& m) {
  auto x = coboundary_part(*g, n, Mat2::sigma());
  auto y = coboundary_part(*g, m, Mat2::tau());
  return nccoh::cocycle_from_pair(std::move(g), std::move(x), std::move(y), 0.0);
}

ExactCocycle non_cuspidal(std::shared_ptr<const ExactGroup> g) {
  auto m = g->one() + ncalg::ExactSeries::letter(g->alphabet(), g->depth(), 0);
  return genuine_pair(g, g->one(), m);
}

}  // namespace itershim::synthetic
