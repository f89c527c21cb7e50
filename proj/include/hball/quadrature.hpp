#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hball/special.hpp"

namespace hball {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1].
/// Nodes from the Golub-Welsch eigenproblem, then Newton-polished; weights by
/// the Christoffel formula. Requires a, b > -1.
Rule1D gauss_jacobi(std::size_t m, double a, double b);
Rule1D gauss_legendre(std::size_t m);

/// Gauss-Legendre rule mapped to [lo, hi].
Rule1D gauss_legendre(std::size_t m, double lo, double hi);

using BallFunction = std::function<double(std::span<const double>)>;

/// Product rule for integral over B of g(x) (1-|x|^2)^gamma dnu(x).
///
/// Radial part: Gauss-Jacobi in u = r^2 with weight u^{n/2-1} (1-u)^gamma,
/// exact for r^{2j} (1-r^2)^gamma, j <= 2m-1. Sphere part: n = 2 uses d+1
/// equispaced angles; n = 3 uses Gauss-Legendre in cos(polar) times d+1
/// equispaced azimuths. Both are exact for spherical polynomials of degree d.
class BallQuadrature {
 public:
  BallQuadrature(Dimension n, double gamma, std::size_t radial_nodes, std::size_t sphere_degree);

  Dimension dimension() const noexcept { return n_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t sphere_degree() const noexcept { return degree_; }

  const std::vector<double>& radii() const noexcept { return radii_; }
  const std::vector<double>& radial_weights() const noexcept { return radial_weights_; }
  const std::vector<Point>& directions() const noexcept { return directions_; }
  const std::vector<double>& direction_weights() const noexcept { return direction_weights_; }

  std::size_t size() const noexcept { return radii_.size() * directions_.size(); }
  /// Node i * directions().size() + j is radii()[i] * directions()[j].
  Point node(std::size_t index) const;
  double weight(std::size_t index) const;

 private:
  Dimension n_;
  double gamma_;
  std::size_t degree_;
  std::vector<double> radii_;
  std::vector<double> radial_weights_;
  std::vector<Point> directions_;
  std::vector<double> direction_weights_;
};

/// Sphere-only rule (the angular factor of BallQuadrature).
void sphere_rule(Dimension n, std::size_t degree, std::vector<Point>& directions, std::vector<double>& weights);

/// Quadrature estimate of the weighted ball integral. Nodes are evaluated in
/// parallel and reduced by pairwise summation in node order. Any exception
/// from g is rethrown as EvaluationFailure.
double integrate_ball(const BallQuadrature& q, const BallFunction& g);

enum class Verdict { Finite, Divergent, Inconclusive };
std::string to_string(Verdict v);

struct ShellOptions {
  std::size_t shells = 40;
  std::size_t radial_nodes = 8;
  std::size_t polar_nodes = 8;     // per polar panel
  std::size_t azimuth_nodes = 16;  // n = 3 only
  double grading = 0.25;           // first polar panel width, relative to the shell width
  double min_panel = 0.0;          // floor for the shell width used in grading
  Point focus;                     // unit vector; defaults to e_1
  /// When set, adds the closing region [1 - 2^{-J}, 1] with a Gauss-Jacobi
  /// radial rule carrying the weight (1-r)^value.
  std::optional<double> closing_exponent;
};

/// One dyadic shell 1 - 2^{-j} <= r < 1 - 2^{-j-1} (or the closing region).
/// Nodes are indexed (i, p, a): radius, polar angle from the focus, then
/// side (n = 2, two sides) or azimuth (n = 3).
struct Shell {
  std::size_t j = 0;
  bool closing = false;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<double> radii;
  std::vector<double> radial_weights;  // include n r^{n-1} dr
  std::vector<double> polar;           // angle from the focus in [0, pi]
  std::vector<double> polar_gaps;      // 1 - cos(polar)
  std::vector<double> polar_weights;   // angular measure per (polar, side/azimuth) node
  std::size_t around = 0;              // sides (n = 2) or azimuths (n = 3)

  std::size_t size() const noexcept { return radii.size() * polar.size() * around; }
  std::size_t index(std::size_t i, std::size_t p, std::size_t a) const noexcept {
    return (i * polar.size() + p) * around + a;
  }
};

class ShellDecomposition {
 public:
  ShellDecomposition(Dimension n, ShellOptions options);

  Dimension dimension() const noexcept { return n_; }
  const ShellOptions& options() const noexcept { return options_; }
  const Point& focus() const noexcept { return options_.focus; }
  std::size_t shell_count() const noexcept { return shells_.size(); }
  const Shell& shell(std::size_t j) const { return shells_.at(j); }
  const std::optional<Shell>& closing() const noexcept { return closing_; }

  Point node(const Shell& s, std::size_t i, std::size_t p, std::size_t a) const;
  double weight(const Shell& s, std::size_t i, std::size_t p, std::size_t a) const;

 private:
  Shell build_shell(std::size_t j, double lo, double hi, bool closing) const;

  Dimension n_;
  ShellOptions options_;
  std::vector<Point> frame_;  // orthonormal complement of the focus
  std::vector<Shell> shells_;
  std::optional<Shell> closing_;
};

/// Node values of a function on a ShellDecomposition. Sampling stops at the
/// first shell whose evaluation is refused (NonConvergent); deeper shells are
/// then absent and `truncated` is set.
struct ShellField {
  double origin = 0.0;
  std::vector<std::vector<double>> shells;
  std::optional<std::vector<double>> closing;
  bool truncated = false;
  std::string truncation_reason;

  std::size_t evaluated() const noexcept { return shells.size(); }
};

ShellField sample_field(const ShellDecomposition& d, const BallFunction& g);

struct ShellIncrement {
  std::size_t j;
  double increment;
  double partial;
};

struct ShellReport {
  std::vector<ShellIncrement> shells;
  std::optional<double> closing;  // closing-region contribution
  double total = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  bool truncated = false;
};

struct VerdictRule {
  double floor = 1e-12;
  double finite_ratio = 0.9;
  double divergent_ratio = 0.99;
  std::size_t window = 5;
};

/// Classifies a sequence of nonnegative shell increments.
Verdict classify_increments(std::span<const double> increments, VerdictRule rule = {});

/// Integrates g (1-|x|^2)^weight_exponent over each shell. The closing region,
/// if present, requires weight_exponent to equal its declared exponent.
ShellReport integrate_shells(const ShellDecomposition& d, const ShellField& g, double weight_exponent,
                             VerdictRule rule = {});
ShellReport integrate_shells(const ShellDecomposition& d, const BallFunction& g, double weight_exponent,
                             VerdictRule rule = {});

struct SupNormProbe {
  double sup = 0.0;
  std::vector<double> shell_maxima;
  bool truncated = false;
};

/// sup over nodes of (1-|x|^2)^alpha_plus_t |g(x)|, including x = 0, with
/// per-shell maxima. g is expected to be |D^t_s f| or D^t_s f.
SupNormProbe sup_norm_probe(const ShellDecomposition& d, const ShellField& g, double alpha_plus_t);
SupNormProbe sup_norm_probe(const BallFunction& g, double alpha_plus_t, const ShellDecomposition& d);

}  // namespace hball
