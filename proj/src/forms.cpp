#include "itershim/forms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace itershim::forms {

namespace {

using u128 = unsigned __int128;

Int to_int(u128 v) {
  bool negative = (v >> 127) != 0;
  u128 mag = negative ? u128(0) - v : v;
  Int r = Int(static_cast<std::uint64_t>(mag >> 64));
  r <<= 64;
  r += Int(static_cast<std::uint64_t>(mag));
  return negative ? Int(-r) : r;
}

u128 from_int64(std::int64_t v) { return static_cast<u128>(static_cast<__int128>(v)); }

// Coefficients of prod_{n>=1} (1 - q^n)^24 up to q^(len-1). Uses Jacobi's
// identity prod (1 - q^n)^3 = sum_j (-1)^j (2j+1) q^(j(j+1)/2) and eight
// sparse multiplications. Arithmetic wraps modulo 2^128; the final values
// fit, so only the intermediate products may wrap.
std::vector<u128> eta24_series(int len) {
  std::vector<std::pair<int, u128>> sparse;
  for (std::int64_t j = 0; j * (j + 1) / 2 < len; ++j)
    sparse.emplace_back(static_cast<int>(j * (j + 1) / 2), from_int64((j % 2 ? -1 : 1) * (2 * j + 1)));
  std::vector<u128> cur(static_cast<std::size_t>(len), 0);
  cur[0] = 1;
  for (int r = 0; r < 8; ++r) {
    std::vector<u128> next(static_cast<std::size_t>(len), 0);
    for (auto [shift, c] : sparse)
      for (int t = 0; t + shift < len; ++t) next[static_cast<std::size_t>(t + shift)] += c * cur[static_cast<std::size_t>(t)];
    cur.swap(next);
  }
  return cur;
}

std::vector<Complex> to_complex(const std::vector<Int>& v) {
  std::vector<Complex> out;
  out.reserve(v.size());
  for (const auto& x : v) out.emplace_back(x.convert_to<double>(), 0.0);
  return out;
}

}  // namespace

CuspForm::CuspForm(std::string name, int weight, std::vector<Complex> coefficients, std::vector<Int> exact)
    : name_(std::move(name)), weight_(weight), coeffs_(std::move(coefficients)), exact_(std::move(exact)) {
  if (weight_ < 12 || weight_ % 2 != 0)
    throw std::invalid_argument("CuspForm: level-1 cusp forms need even weight >= 12");
  if (coeffs_.empty()) throw std::invalid_argument("CuspForm: empty q-expansion");
  if (name_.empty() || name_.find_first_of(": ") != std::string::npos)
    throw std::invalid_argument("CuspForm: name must be nonempty without ':' or spaces");
  growth_ = 0.0;
  for (int n = 1; n <= terms(); ++n)
    growth_ = std::max(growth_, std::abs(coeffs_[static_cast<std::size_t>(n - 1)]) / std::pow(n, weight_ / 2.0));
}

Complex CuspForm::eval(Complex z, double y_min) const {
  if (z.imag() < y_min)
    throw std::domain_error("CuspForm::eval: Im z below y_min for " + name_);
  const Complex q = std::exp(Complex(0.0, 2.0 * std::numbers::pi) * z);
  const double aq = std::abs(q);
  const double half_k = weight_ / 2.0;
  // Stop once the remaining terms are below 1e-18 relative to the leading one.
  const double log_aq = std::log(aq);
  const double cutoff = std::log(1e-18) + log_aq;
  Complex sum = 0.0, qn = 1.0;
  for (int n = 1; n <= terms(); ++n) {
    qn *= q;
    sum += coeffs_[static_cast<std::size_t>(n - 1)] * qn;
    if (n > 1 && std::log(growth_ + 1e-300) + half_k * std::log(n + 1.0) + (n + 1) * log_aq < cutoff) break;
  }
  return sum;
}

double CuspForm::tail_bound(double y) const {
  const double aq = std::exp(-2.0 * std::numbers::pi * y);
  const double half_k = weight_ / 2.0;
  const int n0 = terms() + 1;
  double ratio = aq * std::pow((n0 + 1.0) / n0, half_k);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return growth_ * std::pow(n0, half_k) * std::pow(aq, n0) / (1.0 - ratio);
}

Complex CuspForm::eval_reduced(Complex z) const {
  if (!(z.imag() > 0.0)) throw std::domain_error("CuspForm::eval_reduced: z must lie in H");
  Complex mult = 1.0;
  for (int iter = 0; iter < 10000; ++iter) {
    z -= std::round(z.real());
    if (std::norm(z) >= 1.0 - 1e-14) break;
    mult *= std::pow(z, -weight_);
    z = -1.0 / z;
  }
  return mult * eval(z, 0.0);
}

CuspForm CuspForm::scaled(Complex c) const {
  std::vector<Complex> v = coeffs_;
  for (auto& x : v) x *= c;
  return CuspForm(name_, weight_, std::move(v));
}

std::vector<Int> delta_coefficients(int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("delta_qexp: need at least one term");
  auto eta = eta24_series(n_terms);
  std::vector<Int> out;
  out.reserve(static_cast<std::size_t>(n_terms));
  for (int n = 1; n <= n_terms; ++n) out.push_back(to_int(eta[static_cast<std::size_t>(n - 1)]));
  return out;
}

CuspForm delta_qexp(int n_terms) {
  auto exact = delta_coefficients(n_terms);
  auto c = to_complex(exact);
  return CuspForm("delta", 12, std::move(c), std::move(exact));
}

CuspForm delta_e4_qexp(int n_terms) {
  auto eta = eta24_series(n_terms);
  // E_4 = 1 + 240 sum sigma_3(n) q^n
  std::vector<u128> e4(static_cast<std::size_t>(n_terms), 0);
  e4[0] = 1;
  for (int d = 1; d < n_terms; ++d)
    for (int n = d; n < n_terms; n += d) e4[static_cast<std::size_t>(n)] += u128(240) * u128(d) * u128(d) * u128(d);
  std::vector<Int> exact;
  for (int n = 1; n <= n_terms; ++n) {
    u128 acc = 0;
    for (int i = 0; i <= n - 1; ++i) acc += e4[static_cast<std::size_t>(i)] * eta[static_cast<std::size_t>(n - 1 - i)];
    exact.push_back(to_int(acc));
  }
  auto c = to_complex(exact);
  return CuspForm("delta_e4", 16, std::move(c), std::move(exact));
}

CuspForm builtin_form(const std::string& name, int n_terms) {
  if (name == "delta") return delta_qexp(n_terms);
  if (name == "delta_e4") return delta_e4_qexp(n_terms);
  throw std::invalid_argument("unknown built-in form '" + name + "'");
}

CuspForm form_from_json(const nlohmann::json& j) {
  std::vector<Complex> coeffs;
  for (const auto& c : j.at("coefficients")) {
    if (c.is_array())
      coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    else
      coeffs.emplace_back(c.get<double>(), 0.0);
  }
  return CuspForm(j.at("name").get<std::string>(), j.at("weight").get<int>(), std::move(coeffs));
}

std::function<Complex(Complex)> slash_action(CuspFormPtr f, RealMatrix g, SlashNormalization variant) {
  const double det = g.det();
  if (!(det > 0.0)) throw std::invalid_argument("slash_action: determinant must be positive");
  const int k = f->weight();
  const double twist = variant == SlashNormalization::DetPowKMinus1 ? std::pow(det, k - 1) : std::pow(det, k / 2.0);
  return [f, g, k, twist](Complex z) {
    Complex j = g.c * z + g.d;
    Complex gz = (g.a * z + g.b) / j;
    return f->eval_reduced(gz) * std::pow(j, -k) * twist;
  };
}

// ---------------------------------------------------------------------------

OmegaForm::OmegaForm(std::vector<FormLetter> letters) : letters_(std::move(letters)) {
  std::vector<std::string> ids;
  for (const auto& l : letters_) {
    if (!l.form) throw std::invalid_argument("OmegaForm: letter without form");
    if (l.m < 1 || l.m > l.form->weight() - 1)
      throw std::invalid_argument("OmegaForm: exponent out of the critical range for " + l.id());
    ids.push_back(l.id());
    auto it = std::find(forms_.begin(), forms_.end(), l.form);
    if (it == forms_.end()) {
      for (const auto& f : forms_)
        if (f->name() == l.form->name())
          throw std::invalid_argument("OmegaForm: two different forms named " + f->name());
      forms_.push_back(l.form);
      form_of_letter_.push_back(static_cast<int>(forms_.size()) - 1);
    } else {
      form_of_letter_.push_back(static_cast<int>(it - forms_.begin()));
    }
  }
  alphabet_ = ncalg::make_alphabet(std::move(ids));
}

int OmegaForm::max_weight() const {
  int k = 0;
  for (const auto& f : forms_) k = std::max(k, f->weight());
  return k;
}

int OmegaForm::find(const std::string& form_name, int m) const {
  for (std::size_t i = 0; i < letters_.size(); ++i)
    if (letters_[i].form->name() == form_name && letters_[i].m == m) return static_cast<int>(i);
  return -1;
}

void OmegaForm::densities(Complex z, std::vector<Complex>& out) const {
  out.resize(letters_.size());
  Complex values[16];
  std::vector<Complex> spill;
  Complex* fv = values;
  if (forms_.size() > 16) {
    spill.resize(forms_.size());
    fv = spill.data();
  }
  for (std::size_t i = 0; i < forms_.size(); ++i) fv[i] = forms_[i]->eval_reduced(z);
  // z^(m-1) by repeated multiplication up to the largest exponent.
  int max_m = 1;
  for (const auto& l : letters_) max_m = std::max(max_m, l.m);
  Complex powers[64];
  powers[0] = 1.0;
  for (int e = 1; e < max_m; ++e) powers[e] = powers[e - 1] * z;
  for (std::size_t v = 0; v < letters_.size(); ++v)
    out[v] = fv[form_of_letter_[v]] * powers[letters_[v].m - 1];
}

ncalg::LetterMap<Rational> monomial_pullback(const psl2z::Mat2& g, int k) {
  const int n = k - 1;
  auto poly_pow = [](const Int& x1, const Int& x0, int e) {
    // (x1 z + x0)^e, coefficients by degree
    std::vector<Int> p{Int(1)};
    for (int i = 0; i < e; ++i) {
      std::vector<Int> q(p.size() + 1, Int(0));
      for (std::size_t j = 0; j < p.size(); ++j) {
        q[j] += p[j] * x0;
        q[j + 1] += p[j] * x1;
      }
      p.swap(q);
    }
    return p;
  };
  ncalg::LetterMap<Rational> out(n);
  for (int m = 1; m <= n; ++m) {
    auto left = poly_pow(g.a(), g.b(), m - 1);
    auto right = poly_pow(g.c(), g.d(), k - 1 - m);
    for (std::size_t i = 0; i < left.size(); ++i)
      for (std::size_t j = 0; j < right.size(); ++j) out(static_cast<int>(i + j), m - 1) += Rational(left[i] * right[j]);
  }
  return out;
}

ncalg::LetterMap<Rational> pullback_matrix(const psl2z::Mat2& g, const OmegaForm& omega) {
  const int n = omega.size();
  ncalg::LetterMap<Rational> out(n);
  std::map<int, ncalg::LetterMap<Rational>> by_weight;
  for (int v = 0; v < n; ++v) {
    const auto& letter = omega.letters()[static_cast<std::size_t>(v)];
    const int k = letter.form->weight();
    auto it = by_weight.find(k);
    if (it == by_weight.end()) it = by_weight.emplace(k, monomial_pullback(g, k)).first;
    const auto& mono = it->second;
    for (int mp = 1; mp <= k - 1; ++mp) {
      const Rational& c = mono(mp - 1, letter.m - 1);
      if (c == 0) continue;
      int w = omega.find(letter.form->name(), mp);
      if (w < 0)
        throw std::domain_error("letter action of " + g.to_string() + " leaves the alphabet at " +
                                letter.form->name() + ":" + std::to_string(mp));
      out(w, v) = c;
    }
  }
  return out;
}

ncalg::LetterMap<Rational> letter_action_exact(const psl2z::Mat2& g, const OmegaForm& omega) {
  return pullback_matrix(g, omega).transpose();
}

ncalg::LetterMap<Complex> letter_action(const psl2z::Mat2& g, const OmegaForm& omega) {
  return ncalg::to_complex(letter_action_exact(g, omega));
}

bool is_closed(const OmegaForm& omega) {
  try {
    pullback_matrix(psl2z::Mat2::sigma(), omega);
    pullback_matrix(psl2z::Mat2::tau(), omega);
  } catch (const std::domain_error&) {
    return false;
  }
  return true;
}

OmegaForm close_alphabet(const std::vector<FormLetter>& letters) {
  std::vector<CuspFormPtr> forms;
  std::map<std::string, std::set<int>> exps;
  for (const auto& l : letters) {
    if (std::find(forms.begin(), forms.end(), l.form) == forms.end()) forms.push_back(l.form);
    exps[l.form->name()].insert(l.m);
  }
  std::vector<FormLetter> out;
  for (const auto& f : forms) {
    const int k = f->weight();
    auto s_mat = monomial_pullback(psl2z::Mat2::sigma(), k);
    auto t_mat = monomial_pullback(psl2z::Mat2::tau(), k);
    auto& set = exps[f->name()];
    bool grew = true;
    while (grew) {
      grew = false;
      for (int m : std::set<int>(set))
        for (const auto* mat : {&s_mat, &t_mat})
          for (int mp = 1; mp <= k - 1; ++mp)
            if ((*mat)(mp - 1, m - 1) != 0 && set.insert(mp).second) grew = true;
    }
    for (int m : set) out.push_back({f, m});
  }
  return OmegaForm(std::move(out));
}

}  // namespace itershim::forms
