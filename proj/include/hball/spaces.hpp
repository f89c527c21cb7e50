#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hball/calculus.hpp"
#include "hball/quadrature.hpp"

namespace hball {

enum class SpaceKind { BergmanBesov, Bloch, LittleBloch };

std::string to_string(SpaceKind k);

/// Default differentiation pair: Bergman-Besov t = max(0, ceil((-1-alpha)/p) + 1),
/// Bloch t = max(1, ceil(-alpha) + 1); s = alpha + t in both cases.
DiffPair default_pair(SpaceKind kind, double p, double alpha);

struct SpaceSpec {
  SpaceKind kind = SpaceKind::BergmanBesov;
  double p = 2.0;  // infinity for the Bloch kinds
  double alpha = 0.0;
  DiffPair pair;

  static SpaceSpec bergman_besov(double p, double alpha);
  static SpaceSpec bergman_besov(double p, double alpha, DiffPair pair);
  static SpaceSpec bloch(double alpha);
  static SpaceSpec bloch(double alpha, DiffPair pair);
  static SpaceSpec little_bloch(double alpha);
  static SpaceSpec little_bloch(double alpha, DiffPair pair);

  bool admissible() const;
  /// Throws AdmissibilityError unless alpha + p t > -1 (Bergman-Besov) or
  /// alpha + t > 0 (Bloch kinds).
  void validate() const;
};

/// (1/V_alpha integral |D^t_s f|^p (1-|x|^2)^{alpha+pt} dnu)^{1/p}; q.gamma()
/// must equal alpha + p t.
double besov_norm(const HarmonicExpansion& f, const SpaceSpec& spec, const BallQuadrature& q, double tol = 1e-12);

/// Shell-wise version of the p-th power of the norm integral, with a
/// finiteness verdict.
ShellReport besov_shells(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d,
                         Tolerance tol = {1e-12, 1e-12});

/// |D^t_s f| sampled once on a shell grid, with alpha + t recorded, so norms,
/// level sets and decay tests at many epsilons share one evaluation.
struct WeightedField {
  const ShellDecomposition* grid = nullptr;
  double alpha = 0.0;
  DiffPair pair;
  ShellField values;  // |D^t_s f|
  SupNormProbe probe;  // of (1-|x|^2)^{alpha+t} |D^t_s f|
};

WeightedField weighted_field(const HarmonicExpansion& f, double alpha, DiffPair pair, const ShellDecomposition& d,
                             Tolerance tol = {1e-12, 1e-10});

double bloch_norm(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d);
double bloch_norm(const WeightedField& w);

enum class DecayVerdict { Decaying, NonDecaying, Inconclusive };
std::string to_string(DecayVerdict v);

struct DecayRule {
  double decayed = 1e-6;   // final max below this fraction of the shell-0 max
  double persists = 1e-2;  // tail maxima above this fraction
  double stable_spread = 1.25;
  std::size_t window = 5;
};

DecayVerdict little_bloch_test(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d);
DecayVerdict little_bloch_test(const WeightedField& w, DecayRule rule = {});

struct LevelSetReport {
  double epsilon = 0.0;
  DiffPair pair;
  double alpha = 0.0;
  double weight_exponent = 0.0;
  std::vector<std::size_t> members;  // per shell: nodes inside the set
  std::vector<std::size_t> nodes;    // per shell: node count
  ShellReport integral;
};

LevelSetReport level_set(const WeightedField& w, double epsilon, double weight_exponent, VerdictRule rule = {});
LevelSetReport level_set(const HarmonicExpansion& f, double alpha, DiffPair pair, double epsilon,
                         const ShellDecomposition& d, double weight_exponent);

enum class Membership { Member, NonMember };
std::string to_string(Membership m);

/// R_s(., zeta) belongs to b^p_beta iff beta + n > p (n + s).
Membership membership_kernel_atom(Dimension n, double p, double s, double beta);

enum class Inclusion { Included, NotIncluded };
std::string to_string(Inclusion i);

/// Sharp inclusion conditions between Bergman-Besov and Bloch-type spaces.
/// Throws UnsupportedPair for Bloch -> Bloch and little-Bloch sources.
Inclusion inclusion_predicate(Dimension n, const SpaceSpec& from, const SpaceSpec& to);

/// Applies x -> (1/V_gamma) sum over nodes of R_kernel(x, y) g(y) W(y) to node
/// values g given on a BallQuadrature (whose weight carries (1-|y|^2)^gamma).
/// The kernel series is truncated once per probe and its radial powers are
/// folded into per-direction moments, so the cost is shared across fields.
class ReproductionOperator {
 public:
  ReproductionOperator(const BallQuadrature& q, double kernel_alpha, std::vector<Point> probes, double tol = 1e-13);

  const std::vector<Point>& probes() const noexcept { return probes_; }
  std::size_t degree() const noexcept { return degree_; }

  /// fields[f][node] -> result[f][probe].
  std::vector<std::vector<double>> apply(const std::vector<std::vector<double>>& fields) const;

 private:
  const BallQuadrature* q_;
  double kernel_alpha_;
  std::vector<Point> probes_;
  std::vector<std::vector<double>> scaled_;  // per probe: c_k z_k |x|^k
  std::size_t degree_ = 0;
  double normalizer_ = 1.0;
};

/// Values of g on every node of q, in node order.
std::vector<double> sample_on(const BallQuadrature& q, const HarmonicExpansion& g, double tol = 1e-13);

/// (1/V_{s+t}) integral R_s(x, y) (1-|y|^2)^{s+t} D^t_s f(y) dnu(y); q.gamma()
/// must equal s + t > -1.
double reproduce(const HarmonicExpansion& f, double s, double t, std::span<const double> x, const BallQuadrature& q);
std::vector<std::vector<double>> reproduce_batch(const std::vector<HarmonicExpansion>& fs, DiffPair pair,
                                                 const std::vector<Point>& probes, const BallQuadrature& q);

struct SplitResult {
  double epsilon = 0.0;
  std::vector<Point> probes;
  std::vector<double> f;   // f at probes
  std::vector<double> f1;  // part reproduced from the level set
  std::vector<double> f2;  // part reproduced from its complement
  std::vector<double> df2_weighted;  // (1-|x|^2)^{alpha+t} |D^t_s f2(x)|
  double constant = 0.0;             // max df2_weighted / epsilon
  std::size_t set_nodes = 0;
};

SplitResult split(const HarmonicExpansion& f, double alpha, DiffPair pair, double epsilon, const BallQuadrature& q,
                  const std::vector<Point>& probes);

struct DistanceEstimate {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double norm = 0.0;
  bool inconclusive = false;
  std::size_t evaluations = 0;
};

/// Bisection for the smallest epsilon whose level set has finite
/// (1-|x|^2)^{-n} volume. Stops early on an Inconclusive verdict and reports
/// the trusted bracket.
DistanceEstimate distance_estimate(const WeightedField& w, double relative_width = 1e-3);
DistanceEstimate distance_estimate(const HarmonicExpansion& f, double alpha, DiffPair pair,
                                   const ShellDecomposition& d, double relative_width = 1e-3);

}  // namespace hball
