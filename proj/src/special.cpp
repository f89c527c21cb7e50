#include "hball/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hball {

Dimension::Dimension(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(n));
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double angular_gap(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("angular_gap: size mismatch");
  const double rx = norm(x);
  const double ry = norm(y);
  if (rx == 0.0 || ry == 0.0) return 0.0;
  double chord2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] / rx - y[i] / ry;
    chord2 += d * d;
  }
  return std::min(0.5 * chord2, 2.0);
}

SignedLog log_pochhammer(double a, std::uint64_t k) {
  if (k == 0) return {1.0, 0.0};
  if (a <= 0.0 && a == std::floor(a) && static_cast<double>(k) > -a) {
    return {0.0, -std::numeric_limits<double>::infinity()};
  }
  if (k <= 64) {
    double sign = 1.0;
    double log_abs = 0.0;
    double prod = 1.0;
    for (std::uint64_t j = 0; j < k; ++j) {
      prod *= a + static_cast<double>(j);
      if (std::abs(prod) > 1e250 || std::abs(prod) < 1e-250) {
        sign *= prod < 0 ? -1.0 : 1.0;
        log_abs += std::log(std::abs(prod));
        prod = 1.0;
      }
    }
    sign *= prod < 0 ? -1.0 : 1.0;
    log_abs += std::log(std::abs(prod));
    return {sign, log_abs};
  }
  std::uint64_t negative = 0;
  if (a < 0.0) negative = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(std::ceil(-a)));
  double log_abs = 0.0;
  for (std::uint64_t j = 0; j < negative; ++j) log_abs += std::log(std::abs(a + static_cast<double>(j)));
  if (negative < k) {
    const double lo = a + static_cast<double>(negative);
    log_abs += std::lgamma(a + static_cast<double>(k)) - std::lgamma(lo);
  }
  return {negative % 2 == 0 ? 1.0 : -1.0, log_abs};
}

double pochhammer(double a, std::uint64_t k) {
  if (k <= 32) {
    double prod = 1.0;
    for (std::uint64_t j = 0; j < k; ++j) prod *= a + static_cast<double>(j);
    return prod;
  }
  const SignedLog l = log_pochhammer(a, k);
  if (l.sign == 0.0) return 0.0;
  return l.sign * std::exp(l.log_abs);
}

std::uint64_t dim_spherical_harmonics(Dimension n, std::uint64_t k) {
  if (k == 0) return 1;
  const std::uint64_t d = static_cast<std::uint64_t>(n.value());
  if (d == 2) return 2;
  // h_k = (2k + n - 2) / (n - 2) * C(k + n - 3, k)
  using u128 = unsigned __int128;
  const std::uint64_t top = k + d - 3;
  const std::uint64_t r = std::min(k, d - 3);
  u128 binom = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    binom = binom * (top - r + i) / i;
    if (binom > (u128(1) << 100)) throw std::overflow_error("dim_spherical_harmonics: overflow");
  }
  const u128 h = binom * (2 * k + d - 2) / (d - 2);
  if (h > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("dim_spherical_harmonics: overflow");
  return static_cast<std::uint64_t>(h);
}

double harmonic_dimension_ratio(Dimension n, std::uint64_t k) {
  const double d = n.value();
  if (n.value() == 2) return k == 0 ? 2.0 : 1.0;
  const double kk = static_cast<double>(k);
  return ((2.0 * kk + d) / (2.0 * kk + d - 2.0)) * ((kk + d - 2.0) / (kk + 1.0));
}

double gegenbauer(double lambda, unsigned k, double u) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * u;
  for (unsigned j = 1; j < k; ++j) {
    const double next = (2.0 * (j + lambda) * u * cur - (j + 2.0 * lambda - 1.0) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double zonal(Dimension n, unsigned k, std::span<const double> x, std::span<const double> y) {
  const auto dim = static_cast<std::size_t>(n.value());
  if (x.size() != dim || y.size() != dim) throw std::invalid_argument("zonal: point dimension mismatch");
  if (k == 0) return 1.0;
  const double rx = norm(x);
  const double ry = norm(y);
  if (rx == 0.0 || ry == 0.0) return 0.0;
  const double radial = std::pow(rx * ry, static_cast<double>(k));
  if (n.value() == 2) {
    const double cross = std::abs(x[0] * y[1] - x[1] * y[0]);
    const double theta = std::atan2(cross, dot(x, y));
    return 2.0 * radial * std::cos(k * theta);
  }
  const double u = std::clamp(dot(x, y) / (rx * ry), -1.0, 1.0);
  const double d = n.value();
  const double lambda = 0.5 * (d - 2.0);
  return radial * ((2.0 * k + d - 2.0) / (d - 2.0)) * gegenbauer(lambda, k, u);
}

WeightConstant weight_constant(Dimension n, double alpha) {
  if (alpha <= -1.0) return {alpha, 1.0};
  const double h = n.half();
  const double log_beta = std::lgamma(h) + std::lgamma(alpha + 1.0) - std::lgamma(h + alpha + 1.0);
  return {alpha, h * std::exp(log_beta)};
}

}  // namespace hball
