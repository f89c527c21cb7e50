#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hball/special.hpp"

namespace hball {

/// Which closed form defines gamma_k(alpha). The lower branch is taken for
/// alpha <= -(1 + n/2), including the branch point itself.
enum class Branch { upper, lower };

Branch coefficient_branch(Dimension n, double alpha);

struct KernelCoefficient {
  double alpha;
  std::uint64_t k;
  double value;
};

KernelCoefficient gamma_coeff(Dimension n, double alpha, std::uint64_t k);

/// gamma_k(s+t) / gamma_k(s): the multiplier of D^t_s on degree-k layers.
double gamma_ratio(Dimension n, double s, double t, std::uint64_t k);

/// One factor gamma_k(alpha)^exponent of a coefficient product.
struct GammaFactor {
  double alpha;
  int exponent;  // +1 or -1
};

/// Positive coefficient sequence c_k = prod_j gamma_k(alpha_j)^{e_j}.
///
/// Every such sequence has step ratios c_{k+1}/c_k that are monotone in k for
/// each factor and tend to 1, so sup_{k' >= k} c_{k'+1}/c_{k'} is bounded by
/// the product of max(factor ratio at k, 1). That bound drives the tail
/// estimates of every truncated series in this library.
class CoefficientSequence {
 public:
  CoefficientSequence(Dimension n, std::vector<GammaFactor> factors);

  /// c_k = gamma_k(alpha): the reproducing kernel R_alpha.
  static CoefficientSequence kernel(Dimension n, double alpha);

  Dimension dimension() const noexcept { return n_; }
  const std::vector<GammaFactor>& factors() const noexcept { return factors_; }

  double at(std::uint64_t k) const;
  double step(std::uint64_t k) const;
  double step_bound(std::uint64_t k) const;

 private:
  struct Factor {
    Branch branch;
    double a;  // upper: 1 + n/2 + alpha; lower: 1 - (n/2 + alpha)
    int exponent;
    double alpha;
  };
  double factor_step(const Factor& f, std::uint64_t k) const;

  Dimension n_;
  std::vector<GammaFactor> factors_;
  std::vector<Factor> prepared_;
};

/// Absolute and majorant-relative stopping tolerance for truncated series.
/// A series stops once its certified tail is below max(abs, rel * M), where
/// M is the partial sum of the majorant sum c_k h_k rho^k.
struct Tolerance {
  double abs = 1e-12;
  double rel = 0.0;
};

/// Hard cap on the truncation degree; beyond it evaluation is refused.
inline constexpr std::uint64_t kMaxSeriesDegree = 200000;

/// Truncation plan for sum_k c_k Z_k(x, y) at a fixed rho = |x||y|.
struct SeriesPlan {
  std::uint64_t degree = 0;  // K: terms 0..K are summed
  double tail_bound = 0.0;
  double majorant_sum = 0.0;
  /// scaled[k] = c_k * z_k * rho^k where Z_k = z_k rho^k G_k(u) and G_k is
  /// the Chebyshev (n = 2) or Gegenbauer (n >= 3) polynomial.
  std::vector<double> scaled;
};

/// Chooses K so the certified tail is within tol. Throws NonConvergent if
/// rho >= 1 or the cap is reached.
SeriesPlan plan_series(const CoefficientSequence& c, double rho, Tolerance tol);

/// Evaluates sum_k scaled[k] G_k(u) with w = 1 - u supplied separately so
/// that u close to 1 keeps its precision.
double sum_planned(Dimension n, std::span<const double> scaled, double w);

/// sum_k c_k Z_k(x, y) for given rho and angular gap w.
struct SeriesValue {
  double value;
  std::uint64_t degree;
  double tail_bound;
};

/// G_0..G_{K} at u = 1 - w, K = out.size() - 1, where Z_k = z_k rho^k G_k.
void fill_zonal_polynomials(Dimension n, double w, std::span<double> out);

SeriesValue zonal_series(const CoefficientSequence& c, double rho, double w, Tolerance tol);

/// Values on a grid rho_i = pole_norm * radii[i], gaps w_m, written row-major
/// as out[i * gaps.size() + m]. The truncation is planned once at the largest
/// rho and shared across the grid.
SeriesValue zonal_series_grid(const CoefficientSequence& c, double pole_norm, std::span<const double> radii,
                              std::span<const double> gaps, Tolerance tol, std::span<double> out);

struct KernelEval {
  double value;
  std::uint64_t degree_used;
  double tail_bound;
};

/// R_alpha(x, y) truncated with a certified tail below tol.
KernelEval kernel_eval(Dimension n, double alpha, std::span<const double> x, std::span<const double> y,
                       double tol);

/// |R_alpha(r zeta, zeta)| along the ray to the pole.
std::vector<std::pair<double, double>> kernel_growth_exponent_probe(Dimension n, double alpha,
                                                                    std::span<const double> zeta,
                                                                    std::span<const double> radii,
                                                                    double tol = 1e-10);

}  // namespace hball
