#include "itershim/integrate.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace itershim::integrate {

namespace {

void legendre_all(double x, int n, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 1; k < n; ++k) p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1);
}

GaussRule build_rule(int n) {
  if (n < 2 || n > 200) throw std::invalid_argument("gauss_rule: node count must lie in [2, 200]");
  // Golub-Welsch
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule r;
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    // one Newton polish on P_n
    for (int it = 0; it < 2; ++it) {
      legendre_all(x, n, p);
      double dp = n * (x * p[n] - p[n - 1]) / (x * x - 1.0);
      x -= p[n] / dp;
    }
    legendre_all(x, n, p);
    double dp = n * (x * p[n] - p[n - 1]) / (x * x - 1.0);
    r.nodes.push_back(x);
    r.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  // S(i, j) = sum_k (2k+1)/2 w_j P_k(x_j) int_{-1}^{x_i} P_k
  std::vector<std::vector<double>> pk(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) legendre_all(r.nodes[j], n, pk[j]);
  r.cumulative.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    std::vector<double> ik(static_cast<std::size_t>(n));
    ik[0] = r.nodes[i] + 1.0;
    for (int k = 1; k < n; ++k) ik[k] = (pk[i][k + 1] - pk[i][k - 1]) / (2 * k + 1);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += (2 * k + 1) / 2.0 * pk[j][k] * ik[k];
      r.cumulative[static_cast<std::size_t>(i) * n + j] = s * r.weights[j];
    }
  }
  return r;
}

std::vector<double> make_breaks(const std::function<Complex(double)>& z, const std::function<Complex(double)>& dz,
                                double t0, double t1, double panel) {
  std::vector<double> br{t0};
  if (t0 == t1) return br;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  auto step_at = [&](double t) {
    Complex zt = z(t);
    if (!(zt.imag() > 0.0) || !std::isfinite(zt.real()))
      throw std::domain_error("integration path leaves the upper half plane");
    double speed = std::abs(dz(t));
    if (speed == 0.0) return std::abs(t1 - t0);
    return std::min(panel * zt.imag(), 1.0) / speed;
  };
  double t = t0;
  while (dir * (t1 - t) > 0.0) {
    double h = step_at(t);
    double trial = t + dir * h;
    if (dir * (t1 - trial) > 0.0) h = std::min(h, step_at(trial));
    double next = t + dir * h;
    // avoid a sliver panel at the end
    if (dir * (t1 - next) < 0.25 * h) next = t1;
    br.push_back(next);
    t = next;
    if (br.size() > 200000) throw std::domain_error("integration path needs too many panels");
  }
  step_at(t1);
  return br;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

Segment Segment::chord(Complex a, Complex b, double panel) {
  Segment s;
  s.kind = "chord";
  s.z = [a, b](double t) { return a + t * (b - a); };
  s.dz = [a, b](double) { return b - a; };
  s.breaks = (a == b) ? std::vector<double>{0.0} : make_breaks(s.z, s.dz, 0.0, 1.0, panel);
  return s;
}

Segment Segment::vertical(double x, double y0, double y1, double panel) {
  Segment s;
  s.kind = "vertical";
  s.z = [x](double y) { return Complex(x, y); };
  s.dz = [](double) { return Complex(0.0, 1.0); };
  s.breaks = make_breaks(s.z, s.dz, y0, y1, panel);
  return s;
}

Segment Segment::cusp_ray(const psl2z::Mat2& g, double t0, double t1, double panel) {
  const double a = psl2z::to_double(g.a()), b = psl2z::to_double(g.b()), c = psl2z::to_double(g.c()),
               d = psl2z::to_double(g.d());
  Segment s;
  s.kind = "cusp_ray";
  s.z = [=](double t) {
    Complex w(0.0, t);
    return (a * w + b) / (c * w + d);
  };
  s.dz = [=](double t) {
    Complex j = c * Complex(0.0, t) + d;
    return Complex(0.0, 1.0) / (j * j);
  };
  if (!(t0 > 0.0) || !(t1 > 0.0)) throw std::domain_error("cusp_ray: parameter must stay positive");
  s.breaks = make_breaks(s.z, s.dz, t0, t1, panel);
  return s;
}

Segment Segment::refined() const {
  Segment s = *this;
  s.breaks.clear();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    s.breaks.push_back(breaks[i]);
    s.breaks.push_back(0.5 * (breaks[i] + breaks[i + 1]));
  }
  s.breaks.push_back(breaks.back());
  return s;
}

Series iterated_segment(const DensityFn& density, const ncalg::AlphabetPtr& alphabet, const Segment& seg, int depth,
                        int nodes) {
  Series f = Series::one(alphabet, depth);
  if (seg.breaks.size() < 2 || depth == 0) return f;
  const GaussRule& rule = gauss_rule(nodes);
  const int n = rule.n();
  const std::size_t k = static_cast<std::size_t>(alphabet->size());

  std::vector<Complex> dens;
  std::vector<Complex> g(static_cast<std::size_t>(n) * k);  // g[j*k + v] = phi_v(z_j) z'_j h
  std::vector<std::vector<Complex>> layer(static_cast<std::size_t>(depth) + 1);

  for (std::size_t p = 0; p + 1 < seg.breaks.size(); ++p) {
    const double ta = seg.breaks[p], tb = seg.breaks[p + 1];
    const double h = 0.5 * (tb - ta), mid = 0.5 * (ta + tb);
    for (int j = 0; j < n; ++j) {
      double t = mid + h * rule.nodes[j];
      Complex zt = seg.z(t);
      if (!(zt.imag() > 0.0)) throw std::domain_error("integration path leaves the upper half plane");
      density(zt, dens);
      Complex scale = seg.dz(t) * h;
      for (std::size_t v = 0; v < k; ++v) g[j * k + v] = dens[v] * scale;
    }
    // layer[l][j * L_l + w] = value of F_w at node j, w in layer l
    layer[0].assign(static_cast<std::size_t>(n), Complex(1.0));
    std::vector<Complex> integrand(static_cast<std::size_t>(n));
    for (int l = 1; l <= depth; ++l) {
      const std::size_t prev_size = f.layer_size(l - 1), size = f.layer_size(l);
      const std::size_t off = f.layer_offset(l);
      layer[l].assign(static_cast<std::size_t>(n) * size, Complex(0.0));
      std::vector<Complex> end_values(size);
      for (std::size_t v = 0; v < k; ++v)
        for (std::size_t w = 0; w < prev_size; ++w) {
          const std::size_t word = v * prev_size + w;
          for (int j = 0; j < n; ++j) integrand[j] = g[j * k + v] * layer[l - 1][j * prev_size + w];
          const Complex start = f[off + word];
          Complex total = 0.0;
          for (int j = 0; j < n; ++j) total += rule.weights[j] * integrand[j];
          end_values[word] = start + total;
          if (l < depth)
            for (int i = 0; i < n; ++i) {
              Complex acc = 0.0;
              const double* row = &rule.cumulative[static_cast<std::size_t>(i) * n];
              for (int j = 0; j < n; ++j) acc += row[j] * integrand[j];
              layer[l][i * size + word] = start + acc;
            }
        }
      for (std::size_t w = 0; w < size; ++w) f[off + w] = end_values[w];
    }
  }
  return f;
}

Series iterated_segment(const forms::OmegaForm& omega, const Segment& seg, int depth, int nodes) {
  DensityFn fn = [&omega](Complex z, std::vector<Complex>& out) { omega.densities(z, out); };
  return iterated_segment(fn, omega.alphabet(), seg, depth, nodes);
}

Series iterated_segment_checked(const DensityFn& density, const ncalg::AlphabetPtr& alphabet, const Segment& seg,
                                int depth, int nodes, SegmentDiagnostics& diag) {
  Segment fine = seg.refined();
  Series coarse = iterated_segment(density, alphabet, seg, depth, nodes);
  Series result = iterated_segment(density, alphabet, fine, depth, nodes);
  diag.kind = seg.kind;
  diag.from = seg.start();
  diag.to = seg.end();
  diag.panels = static_cast<int>(fine.breaks.size()) - 1;
  diag.nodes = nodes;
  diag.error_estimate = ncalg::scaled_diff(coarse, result);
  return result;
}

double tail_height(int k, double eps) {
  double y = 1.0;
  for (int i = 0; i < 200; ++i) y = std::max(1.0, (k * std::log(y + 1.0) - std::log(eps)) / (2.0 * std::numbers::pi));
  return y;
}

nlohmann::ordered_json Transport::diagnostics() const {
  nlohmann::ordered_json j;
  j["error_estimate"] = error_estimate;
  j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : segments) {
    nlohmann::ordered_json e;
    e["kind"] = s.kind;
    e["from"] = {s.from.real(), s.from.imag()};
    e["to"] = {s.to.real(), s.to.imag()};
    e["panels"] = s.panels;
    e["nodes"] = s.nodes;
    if (s.error_estimate >= 0.0) e["error_estimate"] = s.error_estimate;
    j["segments"].push_back(e);
  }
  return j;
}

Transporter::Transporter(forms::OmegaForm omega, TransportOptions options)
    : omega_(std::move(omega)), opts_(options) {
  if (opts_.depth < 0 || opts_.depth > ncalg::kMaxDepth) throw std::invalid_argument("transport: depth out of range");
  if (!(opts_.y_cut > 0.0)) throw std::invalid_argument("transport: y_cut must be positive");
  if (!forms::is_closed(omega_))
    throw std::invalid_argument("transport: alphabet is not closed under PSL(2,Z); complete it with close_alphabet");
  y_max_ = std::max(tail_height(omega_.max_weight(), opts_.tail_eps), opts_.y_cut + 1.0);
}

const ncalg::LetterMap<Complex>& Transporter::action(const psl2z::Mat2& g) const {
  auto key = g.to_string();
  auto it = actions_.find(key);
  if (it == actions_.end()) it = actions_.emplace(key, forms::letter_action(g, omega_)).first;
  return it->second;
}

Series Transporter::segment(const Segment& seg, std::vector<SegmentDiagnostics>& diag) const {
  DensityFn fn = [this](Complex z, std::vector<Complex>& out) { omega_.densities(z, out); };
  SegmentDiagnostics d;
  Series s;
  if (opts_.estimate_error) {
    s = iterated_segment_checked(fn, alphabet(), seg, opts_.depth, opts_.nodes, d);
  } else {
    s = iterated_segment(fn, alphabet(), seg, opts_.depth, opts_.nodes);
    d.kind = seg.kind;
    d.from = seg.start();
    d.to = seg.end();
    d.panels = static_cast<int>(seg.breaks.size()) - 1;
    d.nodes = opts_.nodes;
  }
  diag.push_back(d);
  return s;
}

const Transport& Transporter::base_tail() const {
  if (!tail_) {
    Transport t;
    t.result = segment(Segment::vertical(0.0, opts_.y_cut, y_max_, opts_.panel), t.segments);
    t.segments.back().kind = "tail";
    t.error_estimate = std::max(0.0, t.segments.back().error_estimate);
    tail_ = std::move(t);
  }
  return *tail_;
}

namespace {

bool same_point(const psl2z::ExtendedPoint& a, const psl2z::ExtendedPoint& b) {
  if (a.index() != b.index()) return false;
  if (auto ca = std::get_if<psl2z::Cusp>(&a)) return *ca == std::get<psl2z::Cusp>(b);
  return std::abs(std::get<Complex>(a) - std::get<Complex>(b)) < 1e-12;
}

}  // namespace

Transport Transporter::transport(const psl2z::ExtendedPoint& a, const psl2z::ExtendedPoint& b) const {
  Transport out;
  out.result = Series::one(alphabet(), opts_.depth);
  if (same_point(a, b)) return out;

  const Complex anchor_inf(0.0, opts_.y_cut);
  Series pre = Series::one(alphabet(), opts_.depth), post = pre;
  Complex za, zb;
  if (auto c = std::get_if<psl2z::Cusp>(&a)) {
    psl2z::Mat2 h = psl2z::cusp_to_infinity_inverse(*c);
    const auto& tail = base_tail();
    pre = act(h, ncalg::inverse(tail.result));
    za = psl2z::mobius(h, anchor_inf);
    out.segments.push_back(tail.segments.back());
    out.segments.back().kind = "tail from " + c->to_string();
  } else {
    za = std::get<Complex>(a);
  }
  if (auto c = std::get_if<psl2z::Cusp>(&b)) {
    psl2z::Mat2 h = psl2z::cusp_to_infinity_inverse(*c);
    const auto& tail = base_tail();
    post = act(h, tail.result);
    zb = psl2z::mobius(h, anchor_inf);
    out.segments.push_back(tail.segments.back());
    out.segments.back().kind = "tail to " + c->to_string();
  } else {
    zb = std::get<Complex>(b);
  }
  if (!(za.imag() > 0.0) || !(zb.imag() > 0.0)) throw std::domain_error("transport: point outside the upper half plane");
  Series mid = Series::one(alphabet(), opts_.depth);
  if (std::abs(za - zb) >= 1e-12) mid = segment(Segment::chord(za, zb, opts_.panel), out.segments);
  out.result = post * mid * pre;
  for (const auto& s : out.segments) out.error_estimate += std::max(0.0, s.error_estimate);
  return out;
}

Transport Transporter::along_chords(const std::vector<Complex>& points) const {
  Transport out;
  out.result = Series::one(alphabet(), opts_.depth);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (std::abs(points[i] - points[i + 1]) < 1e-12) continue;
    out.result = segment(Segment::chord(points[i], points[i + 1], opts_.panel), out.segments) * out.result;
  }
  for (const auto& s : out.segments) out.error_estimate += std::max(0.0, s.error_estimate);
  return out;
}

double Transporter::equivariance_check(const psl2z::Mat2& g, const psl2z::ExtendedPoint& a,
                                       const psl2z::ExtendedPoint& b) const {
  Series lhs = transport(psl2z::mobius(g, a), psl2z::mobius(g, b)).result;
  Series rhs = act(g, transport(a, b).result);
  return ncalg::scaled_diff(lhs, rhs);
}

}  // namespace itershim::integrate
