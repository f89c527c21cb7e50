#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hball {

/// Ambient Euclidean dimension of the ball. Always at least 2.
class Dimension {
 public:
  explicit Dimension(int n);

  int value() const noexcept { return n_; }
  double half() const noexcept { return 0.5 * n_; }

  friend bool operator==(Dimension, Dimension) = default;

 private:
  int n_;
};

using Point = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);

/// 1 - cos(angle between x and y), computed from the chord between the unit
/// vectors so that nearly parallel arguments keep full relative precision.
/// Returns 0 if either argument is the zero vector.
double angular_gap(std::span<const double> x, std::span<const double> y);

struct SignedLog {
  double sign;     // -1, 0 or +1
  double log_abs;  // log |value|; -inf when sign == 0
};

/// log of the rising factorial a (a+1) ... (a+k-1), with the sign kept apart.
SignedLog log_pochhammer(double a, std::uint64_t k);

/// Rising factorial (a)_k. Exact product for small k, log domain beyond.
double pochhammer(double a, std::uint64_t k);

/// Dimension of the space of degree-k spherical harmonics on S^{n-1}.
std::uint64_t dim_spherical_harmonics(Dimension n, std::uint64_t k);

/// h_{k+1} / h_k, used by majorant bounds. Nonincreasing in k for k >= 1.
double harmonic_dimension_ratio(Dimension n, std::uint64_t k);

/// Gegenbauer polynomial C_k^lambda(u) by the three-term recurrence.
double gegenbauer(double lambda, unsigned k, double u);

/// Zonal harmonic Z_k(x, y), normalised so that Z_k(z, z) = h_k on the sphere.
double zonal(Dimension n, unsigned k, std::span<const double> x, std::span<const double> y);

struct WeightConstant {
  double alpha;
  double value;
};

/// V_alpha = integral of (1-|x|^2)^alpha against normalised volume for
/// alpha > -1, and 1 otherwise.
WeightConstant weight_constant(Dimension n, double alpha);

}  // namespace hball
