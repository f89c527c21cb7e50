#include "hball/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hball/error.hpp"

namespace hball {

namespace {

constexpr std::uint64_t kDirectProductLimit = 4096;

// Step ratio gamma_{k+1}(alpha) / gamma_k(alpha).
double coefficient_step(Branch b, double a, double half, double k) {
  if (b == Branch::upper) return (a + k) / (half + k);
  return ((1.0 + k) / (a + k)) * ((1.0 + k) / (half + k));
}

double branch_parameter(Branch b, double half, double alpha) {
  return b == Branch::upper ? 1.0 + half + alpha : 1.0 - (half + alpha);
}

double log_gamma_coeff(Branch b, double a, double half, std::uint64_t k) {
  const double kk = static_cast<double>(k);
  if (b == Branch::upper) return std::lgamma(a + kk) - std::lgamma(a) - std::lgamma(half + kk) + std::lgamma(half);
  return 2.0 * std::lgamma(1.0 + kk) - std::lgamma(a + kk) + std::lgamma(a) - std::lgamma(half + kk) +
         std::lgamma(half);
}

}  // namespace

Branch coefficient_branch(Dimension n, double alpha) {
  return alpha > -(1.0 + n.half()) ? Branch::upper : Branch::lower;
}

KernelCoefficient gamma_coeff(Dimension n, double alpha, std::uint64_t k) {
  const Branch b = coefficient_branch(n, alpha);
  const double half = n.half();
  const double a = branch_parameter(b, half, alpha);
  if (k > kDirectProductLimit) return {alpha, k, std::exp(log_gamma_coeff(b, a, half, k))};
  double v = 1.0;
  for (std::uint64_t j = 0; j < k; ++j) v *= coefficient_step(b, a, half, static_cast<double>(j));
  return {alpha, k, v};
}

double gamma_ratio(Dimension n, double s, double t, std::uint64_t k) {
  if (t == 0.0 || k == 0) return 1.0;
  const double half = n.half();
  const Branch bs = coefficient_branch(n, s);
  const Branch bt = coefficient_branch(n, s + t);
  const double as = branch_parameter(bs, half, s);
  const double at = branch_parameter(bt, half, s + t);
  if (k > kDirectProductLimit) {
    return std::exp(log_gamma_coeff(bt, at, half, k) - log_gamma_coeff(bs, as, half, k));
  }
  double v = 1.0;
  for (std::uint64_t j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j);
    v *= coefficient_step(bt, at, half, jj) / coefficient_step(bs, as, half, jj);
  }
  return v;
}

CoefficientSequence::CoefficientSequence(Dimension n, std::vector<GammaFactor> factors)
    : n_(n), factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.exponent != 1 && f.exponent != -1) throw std::invalid_argument("GammaFactor exponent must be +1 or -1");
    const Branch b = coefficient_branch(n_, f.alpha);
    prepared_.push_back({b, branch_parameter(b, n_.half(), f.alpha), f.exponent, f.alpha});
  }
}

CoefficientSequence CoefficientSequence::kernel(Dimension n, double alpha) {
  return CoefficientSequence(n, {{alpha, 1}});
}

double CoefficientSequence::factor_step(const Factor& f, std::uint64_t k) const {
  const double r = coefficient_step(f.branch, f.a, n_.half(), static_cast<double>(k));
  return f.exponent > 0 ? r : 1.0 / r;
}

double CoefficientSequence::at(std::uint64_t k) const {
  double v = 1.0;
  for (const auto& f : prepared_) {
    const double g = gamma_coeff(n_, f.alpha, k).value;
    v = f.exponent > 0 ? v * g : v / g;
  }
  return v;
}

double CoefficientSequence::step(std::uint64_t k) const {
  double v = 1.0;
  for (const auto& f : prepared_) v *= factor_step(f, k);
  return v;
}

double CoefficientSequence::step_bound(std::uint64_t k) const {
  // Each elementary ratio (p + k)/(q + k) is monotone in k and tends to 1,
  // so its supremum over k' >= k is max(value at k, 1).
  const double kk = static_cast<double>(k);
  const double half = n_.half();
  double v = 1.0;
  auto bound = [&](double num, double den, int e) {
    const double r = e > 0 ? (num + kk) / (den + kk) : (den + kk) / (num + kk);
    v *= std::max(r, 1.0);
  };
  for (const auto& f : prepared_) {
    if (f.branch == Branch::upper) {
      bound(f.a, half, f.exponent);
    } else {
      bound(1.0, f.a, f.exponent);
      bound(1.0, half, f.exponent);
    }
  }
  return v;
}

namespace {

double zonal_scale(Dimension n, std::uint64_t k) {
  if (k == 0) return 1.0;
  if (n.value() == 2) return 2.0;
  const double d = n.value();
  return (2.0 * static_cast<double>(k) + d - 2.0) / (d - 2.0);
}

}  // namespace

SeriesPlan plan_series(const CoefficientSequence& c, double rho, Tolerance tol) {
  if (!(rho >= 0.0)) throw std::invalid_argument("plan_series: rho must be nonnegative");
  if (rho >= 1.0) throw NonConvergent("series diverges or is uncertified at |x||y| = " + std::to_string(rho));
  const Dimension n = c.dimension();
  SeriesPlan plan;
  double crho = c.at(0);  // c_k rho^k
  double h = 1.0;
  double m = crho;
  plan.majorant_sum = m;
  for (std::uint64_t k = 0;; ++k) {
    plan.scaled.push_back(crho * zonal_scale(n, k));
    const double q = c.step_bound(k) * harmonic_dimension_ratio(n, k) * rho;
    if (q < 1.0) {
      const double tail = m * q / (1.0 - q);
      if (tail <= std::max(tol.abs, tol.rel * plan.majorant_sum)) {
        plan.degree = k;
        plan.tail_bound = tail;
        return plan;
      }
    }
    if (k + 1 > kMaxSeriesDegree) {
      throw NonConvergent("series truncation exceeds degree cap at rho = " + std::to_string(rho));
    }
    crho *= c.step(k) * rho;
    h *= harmonic_dimension_ratio(n, k);
    m = crho * h;
    plan.majorant_sum += m;
  }
}

namespace {

// G_k(u) for u = 1 - w, advanced one degree at a time. For u >= 0 the
// differences G_k - G_{k-1} are carried explicitly so that u near 1 keeps
// full precision; for u < 0 the plain three-term recurrence is used.
class ZonalRecurrence {
 public:
  ZonalRecurrence(Dimension n, double w)
      : circle_(n.value() == 2), lambda_(0.5 * (n.value() - 2.0)), w_(std::clamp(w, 0.0, 2.0)), u_(1.0 - w_),
        near_(w_ <= 1.0) {}

  double value() const noexcept { return cur_; }

  void advance() noexcept {
    if (k_ == 0) {
      prev_ = 1.0;
      cur_ = circle_ ? u_ : 2.0 * lambda_ * u_;
      diff_ = circle_ ? -w_ : 2.0 * lambda_ - 1.0 - 2.0 * lambda_ * w_;
      k_ = 1;
      return;
    }
    const double kk = static_cast<double>(k_);
    double next;
    if (circle_) {
      if (near_) {
        diff_ -= 2.0 * w_ * cur_;
        next = cur_ + diff_;
      } else {
        next = 2.0 * u_ * cur_ - prev_;
      }
    } else if (near_) {
      diff_ = ((kk + 2.0 * lambda_ - 1.0) * diff_ - 2.0 * (kk + lambda_) * w_ * cur_) / (kk + 1.0);
      next = cur_ + diff_;
    } else {
      next = (2.0 * (kk + lambda_) * u_ * cur_ - (kk + 2.0 * lambda_ - 1.0) * prev_) / (kk + 1.0);
    }
    prev_ = cur_;
    cur_ = next;
    ++k_;
  }

 private:
  bool circle_;
  double lambda_;
  double w_;
  double u_;
  bool near_;
  std::size_t k_ = 0;
  double prev_ = 0.0;
  double cur_ = 1.0;
  double diff_ = 0.0;
};

}  // namespace

double sum_planned(Dimension n, std::span<const double> scaled, double w) {
  if (scaled.empty()) return 0.0;
  ZonalRecurrence g(n, w);
  double sum = scaled[0];
  for (std::size_t k = 1; k < scaled.size(); ++k) {
    g.advance();
    sum += scaled[k] * g.value();
  }
  return sum;
}

void fill_zonal_polynomials(Dimension n, double w, std::span<double> out) {
  ZonalRecurrence g(n, w);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k > 0) g.advance();
    out[k] = g.value();
  }
}

SeriesValue zonal_series(const CoefficientSequence& c, double rho, double w, Tolerance tol) {
  const SeriesPlan plan = plan_series(c, rho, tol);
  return {sum_planned(c.dimension(), plan.scaled, w), plan.degree, plan.tail_bound};
}

SeriesValue zonal_series_grid(const CoefficientSequence& c, double pole_norm, std::span<const double> radii,
                              std::span<const double> gaps, Tolerance tol, std::span<double> out) {
  if (out.size() != radii.size() * gaps.size()) throw std::invalid_argument("zonal_series_grid: output size");
  std::fill(out.begin(), out.end(), 0.0);
  if (radii.empty() || gaps.empty()) return {0.0, 0, 0.0};
  const double rmax = *std::max_element(radii.begin(), radii.end());
  const SeriesPlan plan = plan_series(c, pole_norm * rmax, tol);
  const std::size_t R = radii.size();
  std::vector<double> ratios(R);
  for (std::size_t i = 0; i < R; ++i) ratios[i] = rmax > 0.0 ? radii[i] / rmax : 0.0;
  std::vector<double> pw(R);
  std::vector<double> acc(R);
  for (std::size_t m = 0; m < gaps.size(); ++m) {
    ZonalRecurrence g(c.dimension(), gaps[m]);
    std::fill(pw.begin(), pw.end(), 1.0);
    std::fill(acc.begin(), acc.end(), 0.0);
    // pw[i] carries (rho_i / rho_max)^k
    for (std::size_t k = 0; k < plan.scaled.size(); ++k) {
      if (k > 0) g.advance();
      const double term = plan.scaled[k] * g.value();
      for (std::size_t i = 0; i < R; ++i) {
        acc[i] += term * pw[i];
        pw[i] = pw[i] < 1e-280 ? 0.0 : pw[i] * ratios[i];
      }
    }
    for (std::size_t i = 0; i < R; ++i) out[i * gaps.size() + m] = acc[i];
  }
  return {0.0, plan.degree, plan.tail_bound};
}

KernelEval kernel_eval(Dimension n, double alpha, std::span<const double> x, std::span<const double> y,
                       double tol) {
  const auto dim = static_cast<std::size_t>(n.value());
  if (x.size() != dim || y.size() != dim) throw std::invalid_argument("kernel_eval: point dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_eval: tol must be positive");
  const double rho = norm(x) * norm(y);
  const auto c = CoefficientSequence::kernel(n, alpha);
  const SeriesValue v = zonal_series(c, rho, angular_gap(x, y), {tol, 0.0});
  return {v.value, v.degree, v.tail_bound};
}

std::vector<std::pair<double, double>> kernel_growth_exponent_probe(Dimension n, double alpha,
                                                                    std::span<const double> zeta,
                                                                    std::span<const double> radii,
                                                                    double tol) {
  if (std::abs(norm(zeta) - 1.0) > 1e-12) throw std::invalid_argument("kernel_growth_exponent_probe: zeta must be a unit vector");
  std::vector<std::pair<double, double>> out;
  out.reserve(radii.size());
  Point x(zeta.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    if (r < 0.0 || r >= 1.0) throw std::invalid_argument("kernel_growth_exponent_probe: radius outside [0, 1)");
    if (i > 0 && r <= radii[i - 1]) throw std::invalid_argument("kernel_growth_exponent_probe: radii must increase");
    for (std::size_t d = 0; d < zeta.size(); ++d) x[d] = r * zeta[d];
    out.emplace_back(r, std::abs(kernel_eval(n, alpha, x, zeta, tol).value));
  }
  return out;
}

}  // namespace hball
