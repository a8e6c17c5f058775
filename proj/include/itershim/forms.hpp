#pragma once

// Level-1 cusp forms by q-expansion, weight-k slash actions and the alphabet
// of 1-forms f(z) z^(m-1) dz.

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/ncalg.hpp"
#include "itershim/psl2z.hpp"

namespace itershim::forms {

using Complex = std::complex<double>;

inline constexpr double kDefaultYMin = 0.05;
inline constexpr int kDefaultTerms = 5000;

class CuspForm {
 public:
  /// coefficients[n - 1] = a_n for n = 1..N.
  CuspForm(std::string name, int weight, std::vector<Complex> coefficients, std::vector<Int> exact = {});

  const std::string& name() const { return name_; }
  int weight() const { return weight_; }
  int terms() const { return static_cast<int>(coeffs_.size()); }
  Complex coefficient(int n) const { return coeffs_.at(static_cast<std::size_t>(n - 1)); }
  /// Exact integer coefficients when known (built-in forms), else empty.
  const std::vector<Int>& exact_coefficients() const { return exact_; }

  /// Partial sum of the q-expansion. Requires Im z >= y_min.
  Complex eval(Complex z, double y_min = kDefaultYMin) const;

  /// Bound on the discarded tail sum_{n > N} |a_n| |q|^n at height y, using
  /// |a_n| <= A n^(k/2) with A fitted on the stored coefficients.
  double tail_bound(double y) const;

  /// Evaluates anywhere in H by moving z into the standard fundamental domain
  /// with level-1 modularity f(z) = z^(-k) f(-1/z), then summing the expansion.
  Complex eval_reduced(Complex z) const;

  CuspForm scaled(Complex c) const;

 private:
  std::string name_;
  int weight_;
  std::vector<Complex> coeffs_;
  std::vector<Int> exact_;
  double growth_;  // A in |a_n| <= A n^(k/2)
};

using CuspFormPtr = std::shared_ptr<const CuspForm>;

/// Delta = q prod (1 - q^n)^24, exact integer coefficients a_1..a_N.
std::vector<Int> delta_coefficients(int n_terms);
CuspForm delta_qexp(int n_terms = kDefaultTerms);
/// Delta * E_4, the normalized cusp form of weight 16.
CuspForm delta_e4_qexp(int n_terms = kDefaultTerms);

/// {"name": ..., "weight": k, "coefficients": [a_1, a_2, ...]} where each
/// entry is a number or a [re, im] pair.
CuspForm form_from_json(const nlohmann::json& j);
CuspForm builtin_form(const std::string& name, int n_terms = kDefaultTerms);

struct RealMatrix {
  double a, b, c, d;
  double det() const { return a * d - b * c; }
};

enum class SlashNormalization { DetPowKMinus1, DetPowKHalf };

/// z -> f([g]z) j(g,z)^(-k) det(g)^(k-1)  (or det(g)^(k/2)).
std::function<Complex(Complex)> slash_action(CuspFormPtr f, RealMatrix g, SlashNormalization variant);

struct FormLetter {
  CuspFormPtr form;
  int m;  // 1 <= m <= k-1

  std::string id() const { return form->name() + ":" + std::to_string(m); }
};

/// The connection form sum_v A_v omega_v over an ordered list of letters.
class OmegaForm {
 public:
  explicit OmegaForm(std::vector<FormLetter> letters);

  const std::vector<FormLetter>& letters() const { return letters_; }
  const ncalg::AlphabetPtr& alphabet() const { return alphabet_; }
  int size() const { return static_cast<int>(letters_.size()); }
  int max_weight() const;
  /// Index of (form, m) or -1.
  int find(const std::string& form_name, int m) const;

  /// out[v] = f_v(z) z^(m_v - 1) with f evaluated by eval_reduced.
  void densities(Complex z, std::vector<Complex>& out) const;

 private:
  std::vector<FormLetter> letters_;
  ncalg::AlphabetPtr alphabet_;
  std::vector<CuspFormPtr> forms_;     // distinct forms
  std::vector<int> form_of_letter_;    // index into forms_
};

/// (k-1)x(k-1) matrix: column m-1 holds the coefficients of z^(m'-1) in
/// (az+b)^(m-1) (cz+d)^(k-1-m), i.e. the pullback g^* on monomial letters.
ncalg::LetterMap<Rational> monomial_pullback(const psl2z::Mat2& g, int k);

/// Pullback matrix P restricted to the alphabet: g^* omega_v = sum_w P(w, v)
/// omega_w. Throws if the image leaves the span of the alphabet.
ncalg::LetterMap<Rational> pullback_matrix(const psl2z::Mat2& g, const OmegaForm& omega);

/// The adjoint g_* on the dual letters A_v under the Kronecker pairing: the
/// transpose of the pullback matrix.
ncalg::LetterMap<Rational> letter_action_exact(const psl2z::Mat2& g, const OmegaForm& omega);
ncalg::LetterMap<Complex> letter_action(const psl2z::Mat2& g, const OmegaForm& omega);

bool is_closed(const OmegaForm& omega);
/// Smallest superset of the given letters closed under sigma and tau,
/// ordered by form then exponent.
OmegaForm close_alphabet(const std::vector<FormLetter>& letters);

}  // namespace itershim::forms
