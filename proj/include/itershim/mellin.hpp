#pragma once

// Mellin transforms of cusp forms along the imaginary axis, iterated Mellin
// transforms and the total Mellin transform of a family of letters.

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/forms.hpp"
#include "itershim/integrate.hpp"
#include "itershim/ncalg.hpp"

namespace itershim::mellin {

using Complex = std::complex<double>;

/// Complex Gamma function (Lanczos, g = 7, with reflection for Re s < 1/2).
Complex complex_gamma(Complex s);

struct MellinValue {
  Complex s;
  Complex value;
  double error_estimate = 0.0;  // step doubling on the quadrature
};

struct MellinOptions {
  int nodes = 20;
  double panel = 0.5;
  double tail_eps = 1e-22;
};

/// Lambda(f; s) = int_{i inf}^{0} f(z) z^(s-1) dz with the principal branch,
/// computed as -i^s [ I_{y0}(s) + i^k I_{1/y0}(k - s) ],
/// I_c(s) = int_c^inf f(it) t^(s-1) dt, using f(i/t) = (it)^k f(it). The
/// integrand uses the q-expansion directly; y0 must lie in [0.2, 5].
MellinValue lambda(const forms::CuspForm& f, Complex s, double y0 = 1.0, const MellinOptions& opts = {});

struct DirichletValue {
  Complex value;
  double tail_estimate = 0.0;  // |S_N - S_{N/2}| scaled like the value
  int terms = 0;
};

/// -Gamma(s) / (-2 pi i)^s * sum a_n n^(-s), partial sum over the stored
/// coefficients (or the first n_terms). Requires Re s >= k/2 + 1.5.
DirichletValue lambda_via_dirichlet(const forms::CuspForm& f, Complex s, int n_terms = 0);

struct FunctionalEquation {
  Complex s;
  Complex lambda_s, lambda_k_minus_s;
  double residual_plus = 0.0;   // |L(s) - e^{i pi s} L(k-s)| / scale
  double residual_minus = 0.0;  // |L(s) + e^{i pi s} L(k-s)| / scale
  std::string consistent_sign() const { return residual_plus <= residual_minus ? "+" : "-"; }
};

/// Both sign conventions of Lambda(s) = (sign) e^{i pi s} Lambda(k - s) at
/// level 1 (N = 1, epsilon = 1). Lambda(s) is split at 1, Lambda(k - s) at 1.7,
/// so the residual tests the modularity of the coefficients.
FunctionalEquation functional_equation_residual(const forms::CuspForm& f, Complex s, const MellinOptions& opts = {});

struct MellinArgument {
  forms::CuspFormPtr form;
  Complex s;
};

/// The series J_{i T}^{i/T} of the densities f_j(z) z^(s_j - 1) along
/// i T -> i (vertical) and i -> i/T (image of the vertical ray under sigma),
/// with T chosen so the discarded tails are below tail_eps.
struct DirectPathSeries {
  ncalg::Series series;
  double error_estimate = 0.0;
  double t_max = 0.0;
};
DirectPathSeries direct_path(const std::vector<MellinArgument>& args, int depth, const MellinOptions& opts = {});

/// M(f_1..f_n; s_1..s_n) = I_{i inf}^{0}(omega_1, ..., omega_n), omega_1
/// outermost.
MellinValue iterated_mellin(const std::vector<MellinArgument>& args, const MellinOptions& opts = {});

struct TotalMellin {
  ncalg::Series tm;            // TM(s_V)
  ncalg::Series tm_dual;       // TM(k_V - s_V) relabelled and twisted into the letters of V
  double residual = 0.0;       // |TM(s) phi(TM(k - s)) - 1|
  double error_estimate = 0.0;
  nlohmann::ordered_json to_json() const;
};

/// Letters (f, m) with integer s = m. phi sends the letter of (f, k - m) to
/// (-1)^(m-1) times the letter of (f, m).
TotalMellin total_mellin(const std::vector<forms::FormLetter>& letters, int depth, const MellinOptions& opts = {});

struct TmCoincidence {
  double tm_vs_transport = 0.0;  // TM(s) against J_{i inf}^{0} from the transporter
  double dual_vs_x = 0.0;        // phi(TM(k - s)) against X = J_0^{i inf}
  double residual_tm = 0.0;
  double residual_shimura_eichler = 0.0;  // |X sigma(X) - 1| at base i inf
  double gap() const;
  nlohmann::ordered_json to_json() const;
};

/// Level one: over the full (closed) alphabet of tr, with s_v = m_v, the TM
/// relation is X sigma(X) = 1 for the cocycle based at i inf.
TmCoincidence tm_coincidence(const integrate::Transporter& tr, const MellinOptions& opts = {});

}  // namespace itershim::mellin
