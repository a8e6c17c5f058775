#include "itershim/shimura.hpp"

#include <numbers>

namespace itershim::shimura {

std::shared_ptr<const Group> series_group(const integrate::Transporter& tr) {
  return std::make_shared<const Group>(tr.alphabet(), tr.options().depth, tr.action(Mat2::sigma()),
                                       tr.action(Mat2::tau()));
}

namespace {

Cocycle build(const integrate::Transporter& tr, const ExtendedPoint& a, double tol) {
  auto grp = series_group(tr);
  Series x = tr(psl2z::mobius(Mat2::sigma(), a), a);
  Series y = tr(psl2z::mobius(Mat2::tau(), a), a);
  return nccoh::cocycle_from_pair(grp, std::move(x), std::move(y), tol);
}

Series depth1(const Series& s) {
  Series r(s.alphabet(), s.depth());
  r[0] = s[0];
  for (std::size_t i = 0; i < s.layer_size(1); ++i) r[s.layer_offset(1) + i] = s[s.layer_offset(1) + i];
  return r;
}

}  // namespace

ShimuraCocycle::ShimuraCocycle(const integrate::Transporter& tr, ExtendedPoint a, double tol)
    : tr_(&tr), base_(a), cocycle_(build(tr, a, tol)) {}

Series ShimuraCocycle::direct(const Mat2& g) const { return (*tr_)(psl2z::mobius(g, base_), base_); }

double ShimuraCocycle::extension_residual(const std::vector<Mat2>& elements) const {
  double worst = 0.0;
  for (const auto& g : elements) worst = std::max(worst, ncalg::scaled_diff(cocycle_(g), direct(g)));
  return worst;
}

double ShimuraCocycle::extension_scale(const Mat2& g) const {
  double m = 1.0;
  Mat2 h;
  const auto word = psl2z::normal_form(g);
  for (auto t : word.tokens()) {
    if (t == psl2z::Token::Sigma) {
      m = std::max(m, tr_->act(h, X()).max_abs());
    } else {
      m = std::max(m, tr_->act(h, Y()).max_abs());
      if (t == psl2z::Token::TauSq) m = std::max(m, tr_->act(h * Mat2::tau(), Y()).max_abs());
    }
    h = h * psl2z::token_matrix(t);
  }
  return m;
}

double ShimuraCocycle::conditioned_extension_residual(const std::vector<Mat2>& elements) const {
  double worst = 0.0;
  for (const auto& g : elements) {
    Series d = direct(g);
    double scale = std::max(d.max_abs(), extension_scale(g));
    worst = std::max(worst, ncalg::max_abs_diff(cocycle_(g), d) / scale);
  }
  return worst;
}

nlohmann::ordered_json ShimuraCocycle::report() const {
  nlohmann::ordered_json j;
  j["base_point"] = psl2z::point_to_string(base_);
  j["depth"] = tr_->options().depth;
  j["alphabet"] = tr_->alphabet()->letters();
  auto r = cocycle_.relations();
  j["relation_residual_sigma"] = r.sigma;
  j["relation_residual_tau"] = r.tau;
  j["X"] = ncalg::to_json(X());
  j["Y"] = ncalg::to_json(Y());
  return j;
}

double base_point_independence(const ShimuraCocycle& u, const ShimuraCocycle& u2, const std::vector<Mat2>& elements) {
  Series n = u.transporter()(u2.base(), u.base());
  return nccoh::equivalent(u.group(), u.cocycle(), u2.cocycle(), n, elements);
}

double rho_sigma_identity(const forms::OmegaForm& omega, int depth, int nodes) {
  const Complex i(0.0, 1.0);
  const Complex rho = std::polar(1.0, std::numbers::pi / 3.0);
  const Complex sigma_rho = -1.0 / rho;
  auto lhs = integrate::iterated_segment(omega, integrate::Segment::chord(sigma_rho, rho), depth, nodes);
  auto j = integrate::iterated_segment(omega, integrate::Segment::chord(i, rho), depth, nodes);
  auto s = forms::letter_action(Mat2::sigma(), omega);
  auto rhs = j * ncalg::inverse(ncalg::apply_letter_map(s, j));
  return ncalg::scaled_diff(lhs, rhs);
}

nlohmann::ordered_json CfDecomposition::to_json() const {
  nlohmann::ordered_json j;
  j["a"] = a.str();
  j["orientation"] = orientation;
  j["factors"] = factors;
  j["residual"] = residual;
  j["depth1_residual"] = depth1_residual;
  j["calibration_gap"] = calibration_gap;
  return j;
}

CfDecomposition cf_decomposition(const integrate::Transporter& tr, const Rational& a) {
  CfDecomposition out;
  out.a = a;
  const auto cf = psl2z::convergents(a);
  const psl2z::Cusp zero(0, 1), inf = psl2z::Cusp::infinity();
  const Series p_up = tr(zero, inf), p_down = tr(inf, zero);
  out.direct = tr(inf, psl2z::Cusp::from_rational(a));

  auto product = [&](const Series& p) {
    Series acc = Series::one(tr.alphabet(), tr.options().depth);
    // k = n is the left-most factor
    for (int k = 0; k <= cf.n(); ++k) acc = tr.act(cf.matrices[static_cast<std::size_t>(k)], p) * acc;
    return acc;
  };
  Series up = product(p_up), down = product(p_down);
  double r_up = ncalg::scaled_diff(depth1(up), depth1(out.direct));
  double r_down = ncalg::scaled_diff(depth1(down), depth1(out.direct));
  if (r_up <= r_down) {
    out.orientation = "0->inf";
    out.product = std::move(up);
    out.depth1_residual = r_up;
    out.calibration_gap = r_down;
  } else {
    out.orientation = "inf->0";
    out.product = std::move(down);
    out.depth1_residual = r_down;
    out.calibration_gap = r_up;
  }
  out.factors = cf.n() + 1;
  out.residual = ncalg::scaled_diff(out.product, out.direct);
  return out;
}

}  // namespace itershim::shimura
