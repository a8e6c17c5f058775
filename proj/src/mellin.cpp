#include "itershim/mellin.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace itershim::mellin {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// principal i^s
Complex i_pow(Complex s) { return std::exp(kI * (kPi / 2.0) * s); }

Complex composite_gl(const std::function<Complex(double)>& fn, double a, double b, double panel, int nodes) {
  const auto& rule = integrate::gauss_rule(nodes);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
  const double h = (b - a) / panels;
  Complex sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int j = 0; j < rule.n(); ++j) sum += rule.weights[j] * fn(mid + 0.5 * h * rule.nodes[j]);
  }
  return 0.5 * h * sum;
}

double cut_height(int k, double exponent, double eps) {
  return integrate::tail_height(static_cast<int>(std::ceil(std::max(1.0, exponent))) + k, eps);
}

}  // namespace

Complex complex_gamma(Complex s) {
  // Lanczos, g = 607/128, 15 terms
  static constexpr double g = 607.0 / 128.0;
  static constexpr std::array<double, 15> c{
      0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,    14.136097974741747174,
      -0.49191381609762019978,    .33994649984811888699e-4,   .46523628927048575665e-4,  -.98374475304879564677e-4,
      .15808870322491248884e-3,   -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
      .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};
  if (s.real() < 0.5) return kPi / (std::sin(kPi * s) * complex_gamma(1.0 - s));
  s -= 1.0;
  Complex x = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) x += c[i] / (s + static_cast<double>(i));
  const Complex t = s + g + 0.5;
  return std::sqrt(2.0 * kPi) * std::exp((s + 0.5) * std::log(t) - t) * x;
}

MellinValue lambda(const forms::CuspForm& f, Complex s, double y0, const MellinOptions& opts) {
  if (!(y0 >= 0.2 && y0 <= 5.0)) throw std::invalid_argument("lambda: split point must lie in [0.2, 5]");
  const int k = f.weight();
  const double expo = std::max(std::abs(s.real()), std::abs(k - s.real())) + 1.0;
  const double t_max = std::max({cut_height(0, expo, opts.tail_eps), y0 + 1.0, 1.0 / y0 + 1.0});
  auto part = [&](double c, Complex e, double panel) {
    // plain q-expansion: no modular transformation enters the integrand
    return composite_gl([&](double t) { return f.eval(Complex(0.0, t)) * std::pow(t, e - 1.0); }, c, t_max,
                        panel, opts.nodes);
  };
  const Complex ik = (k / 2) % 2 == 0 ? 1.0 : -1.0;
  auto total = [&](double panel) { return -i_pow(s) * (part(y0, s, panel) + ik * part(1.0 / y0, static_cast<double>(k) - s, panel)); };
  MellinValue out;
  out.s = s;
  out.value = total(opts.panel);
  out.error_estimate = std::abs(out.value - total(0.5 * opts.panel)) / std::max(std::abs(out.value), 1e-300);
  return out;
}

DirichletValue lambda_via_dirichlet(const forms::CuspForm& f, Complex s, int n_terms) {
  const int k = f.weight();
  if (s.real() < k / 2.0 + 1.5)
    throw std::domain_error("lambda_via_dirichlet: Re s must be at least k/2 + 1.5 for absolute convergence");
  const int n = n_terms > 0 ? std::min(n_terms, f.terms()) : f.terms();
  Complex half = 0.0, full = 0.0;
  for (int m = 1; m <= n; ++m) {
    full += f.coefficient(m) * std::exp(-s * std::log(static_cast<double>(m)));
    if (m == n / 2) half = full;
  }
  const Complex pre = -i_pow(s) * complex_gamma(s) * std::exp(-s * std::log(2.0 * kPi));
  DirichletValue out;
  out.value = pre * full;
  out.tail_estimate = std::abs(pre * (full - half));
  out.terms = n;
  return out;
}

FunctionalEquation functional_equation_residual(const forms::CuspForm& f, Complex s, const MellinOptions& opts) {
  FunctionalEquation fe;
  fe.s = s;
  fe.lambda_s = lambda(f, s, 1.0, opts).value;
  // a different split point: with the same one both sides reuse the same two
  // integrals and the relation holds by construction
  fe.lambda_k_minus_s = lambda(f, static_cast<double>(f.weight()) - s, 1.7, opts).value;
  const Complex rhs = std::exp(kI * kPi * s) * fe.lambda_k_minus_s;
  const double scale = std::max({std::abs(fe.lambda_s), std::abs(fe.lambda_k_minus_s), 1e-300});
  fe.residual_plus = std::abs(fe.lambda_s - rhs) / scale;
  fe.residual_minus = std::abs(fe.lambda_s + rhs) / scale;
  return fe;
}

DirectPathSeries direct_path(const std::vector<MellinArgument>& args, int depth, const MellinOptions& opts) {
  if (args.empty()) throw std::invalid_argument("direct_path: no letters");
  std::vector<std::string> names;
  int kmax = 0;
  double expo = 0.0;
  for (std::size_t j = 0; j < args.size(); ++j) {
    if (!args[j].form) throw std::invalid_argument("direct_path: missing form");
    names.push_back("w" + std::to_string(j + 1));
    kmax = std::max(kmax, args[j].form->weight());
    expo = std::max(expo, std::abs(args[j].s.real()));
  }
  auto alphabet = ncalg::make_alphabet(names);
  integrate::DensityFn density = [&args](Complex z, std::vector<Complex>& out) {
    out.resize(args.size());
    for (std::size_t j = 0; j < args.size(); ++j) out[j] = args[j].form->eval_reduced(z) * std::pow(z, args[j].s - 1.0);
  };
  DirectPathSeries out;
  out.t_max = cut_height(kmax, expo + 2.0, opts.tail_eps);
  auto up = integrate::Segment::vertical(0.0, out.t_max, 1.0, opts.panel);
  auto down = integrate::Segment::cusp_ray(psl2z::Mat2::sigma(), 1.0, out.t_max, opts.panel);
  integrate::SegmentDiagnostics d1, d2;
  auto a = integrate::iterated_segment_checked(density, alphabet, up, depth, opts.nodes, d1);
  auto b = integrate::iterated_segment_checked(density, alphabet, down, depth, opts.nodes, d2);
  out.series = b * a;
  out.error_estimate = d1.error_estimate + d2.error_estimate;
  return out;
}

MellinValue iterated_mellin(const std::vector<MellinArgument>& args, const MellinOptions& opts) {
  const int n = static_cast<int>(args.size());
  if (n > ncalg::kMaxDepth) throw std::invalid_argument("iterated_mellin: too many arguments");
  auto dp = direct_path(args, n, opts);
  ncalg::Word w;
  for (int j = 0; j < n; ++j) w.push_back(j);
  MellinValue out;
  out.s = n > 0 ? args[0].s : Complex(0.0);
  out.value = dp.series.at(w);
  out.error_estimate = dp.error_estimate;
  return out;
}

nlohmann::ordered_json TotalMellin::to_json() const {
  nlohmann::ordered_json j;
  j["residual"] = residual;
  j["error_estimate"] = error_estimate;
  j["tm"] = ncalg::to_json(tm);
  return j;
}

TotalMellin total_mellin(const std::vector<forms::FormLetter>& letters, int depth, const MellinOptions& opts) {
  std::vector<MellinArgument> args, dual;
  for (const auto& l : letters) {
    const int k = l.form->weight();
    if (l.m < 1 || l.m > k - 1) throw std::invalid_argument("total_mellin: s outside 1..k-1");
    args.push_back({l.form, static_cast<double>(l.m)});
    dual.push_back({l.form, static_cast<double>(k - l.m)});
  }
  forms::OmegaForm omega(letters);  // validates and names the letters
  auto tm = direct_path(args, depth, opts);
  auto tm_dual = direct_path(dual, depth, opts);

  TotalMellin out;
  out.tm = ncalg::Series(omega.alphabet(), depth);
  out.tm_dual = ncalg::Series(omega.alphabet(), depth);
  for (std::size_t i = 0; i < out.tm.size(); ++i) {
    out.tm[i] = tm.series[i];
    out.tm_dual[i] = tm_dual.series[i];
  }
  ncalg::LetterMap<Complex> phi(omega.size());
  for (int v = 0; v < omega.size(); ++v) phi(v, v) = letters[static_cast<std::size_t>(v)].m % 2 == 1 ? 1.0 : -1.0;
  out.tm_dual = ncalg::apply_letter_map(phi, out.tm_dual);
  out.residual = ncalg::scaled_diff(out.tm * out.tm_dual, ncalg::Series::one(omega.alphabet(), depth));
  out.error_estimate = tm.error_estimate + tm_dual.error_estimate;
  return out;
}

double TmCoincidence::gap() const {
  return std::max({tm_vs_transport, dual_vs_x, std::abs(residual_tm - residual_shimura_eichler)});
}

nlohmann::ordered_json TmCoincidence::to_json() const {
  nlohmann::ordered_json j;
  j["tm_vs_transport"] = tm_vs_transport;
  j["dual_vs_X"] = dual_vs_x;
  j["residual_tm"] = residual_tm;
  j["residual_shimura_eichler"] = residual_shimura_eichler;
  j["gap"] = gap();
  return j;
}

TmCoincidence tm_coincidence(const integrate::Transporter& tr, const MellinOptions& opts) {
  const int depth = tr.options().depth;
  auto tm = total_mellin(tr.omega().letters(), depth, opts);
  const psl2z::Cusp inf = psl2z::Cusp::infinity(), zero(0, 1);
  const ncalg::Series x = tr(zero, inf);
  TmCoincidence out;
  out.tm_vs_transport = ncalg::scaled_diff(tm.tm, tr(inf, zero));
  out.dual_vs_x = ncalg::scaled_diff(tm.tm_dual, x);
  out.residual_tm = tm.residual;
  out.residual_shimura_eichler =
      ncalg::scaled_diff(x * tr.act(psl2z::Mat2::sigma(), x), ncalg::Series::one(tr.alphabet(), depth));
  return out;
}

}  // namespace itershim::mellin
