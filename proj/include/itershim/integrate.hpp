#pragma once

// Iterated integrals of the connection form along paths in the upper half
// plane, and transport between points of H union the cusps.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "itershim/forms.hpp"
#include "itershim/ncalg.hpp"
#include "itershim/psl2z.hpp"

namespace itershim::integrate {

using Complex = std::complex<double>;
using ncalg::Series;

/// Gauss-Legendre rule on [-1, 1] plus the cumulative integration matrix
/// S(i, j) = int_{-1}^{x_i} l_j(x) dx of the Lagrange basis.
struct GaussRule {
  std::vector<double> nodes, weights;
  std::vector<double> cumulative;  // row-major n x n
  int n() const { return static_cast<int>(nodes.size()); }
};
const GaussRule& gauss_rule(int n);

/// A parametrized arc t in [t0, t1] -> z(t) with derivative and panel breaks.
struct Segment {
  std::string kind;
  std::function<Complex(double)> z;
  std::function<Complex(double)> dz;
  std::vector<double> breaks;  // t0 = breaks.front(), t1 = breaks.back()

  Complex start() const { return z(breaks.front()); }
  Complex end() const { return z(breaks.back()); }

  /// Straight chord a -> b.
  static Segment chord(Complex a, Complex b, double panel = 0.5);
  /// Vertical line z = x + i y with y running from y0 to y1.
  static Segment vertical(double x, double y0, double y1, double panel = 0.5);
  /// z = g(i t) for t from t0 to t1.
  static Segment cusp_ray(const psl2z::Mat2& g, double t0, double t1, double panel = 0.5);
  /// Halve every panel (used for the step-doubling error estimate).
  Segment refined() const;
};

/// out[v] = density of letter v at z, so that omega_v = out[v] dz.
using DensityFn = std::function<void(Complex, std::vector<Complex>&)>;

struct SegmentDiagnostics {
  std::string kind;
  Complex from, to;
  int panels = 0;
  int nodes = 0;
  double error_estimate = -1.0;  // < 0 when not estimated
};

/// Iterated integral along one segment: F_empty = 1 and
/// F_{v w}(t) = int_{t0}^{t} phi_v(z(s)) z'(s) F_w(s) ds,
/// so the left-most letter is the outermost integration.
Series iterated_segment(const DensityFn& density, const ncalg::AlphabetPtr& alphabet, const Segment& seg, int depth,
                        int nodes = 20);
Series iterated_segment(const forms::OmegaForm& omega, const Segment& seg, int depth, int nodes = 20);

/// As above, with a step-doubling error estimate written into diag.
Series iterated_segment_checked(const DensityFn& density, const ncalg::AlphabetPtr& alphabet, const Segment& seg,
                                int depth, int nodes, SegmentDiagnostics& diag);

struct TransportOptions {
  int depth = ncalg::kDefaultDepth;
  int nodes = 20;
  double panel = 0.5;
  double y_cut = 1.0;
  double tail_eps = 1e-20;
  bool estimate_error = true;
};

struct Transport {
  Series result;
  std::vector<SegmentDiagnostics> segments;
  double error_estimate = 0.0;

  nlohmann::ordered_json diagnostics() const;
};

/// Height at which the vertical ray to i infinity is cut: the smallest Y with
/// exp(-2 pi Y) (Y + 1)^k <= eps.
double tail_height(int k, double eps);

/// Computes J_a^b, the iterated integral from a to b. Cusps are reached by
/// moving i infinity with a group element and using equivariance.
class Transporter {
 public:
  Transporter(forms::OmegaForm omega, TransportOptions options = {});

  const forms::OmegaForm& omega() const { return omega_; }
  const TransportOptions& options() const { return opts_; }
  const ncalg::AlphabetPtr& alphabet() const { return omega_.alphabet(); }
  double y_max() const { return y_max_; }

  Transport transport(const psl2z::ExtendedPoint& a, const psl2z::ExtendedPoint& b) const;
  Series operator()(const psl2z::ExtendedPoint& a, const psl2z::ExtendedPoint& b) const {
    return transport(a, b).result;
  }
  /// Along an explicit polygon of chords a = p_0 -> p_1 -> ... -> p_n (all in H).
  Transport along_chords(const std::vector<Complex>& points) const;

  /// Letter map g_* on the alphabet.
  const ncalg::LetterMap<Complex>& action(const psl2z::Mat2& g) const;
  Series act(const psl2z::Mat2& g, const Series& s) const { return ncalg::apply_letter_map(action(g), s); }

  /// J_{i y_cut}^{i infinity}, cached.
  const Transport& base_tail() const;

  /// Residual between transport(g a, g b) and g_* transport(a, b).
  double equivariance_check(const psl2z::Mat2& g, const psl2z::ExtendedPoint& a,
                            const psl2z::ExtendedPoint& b) const;

 private:
  Series segment(const Segment& seg, std::vector<SegmentDiagnostics>& diag) const;

  forms::OmegaForm omega_;
  TransportOptions opts_;
  double y_max_;
  mutable std::optional<Transport> tail_;
  mutable std::map<std::string, ncalg::LetterMap<Complex>> actions_;
};

}  // namespace itershim::integrate
