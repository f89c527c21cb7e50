#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hball/special.hpp"

using namespace hball;

namespace {

// sum_j (-1)^j Gamma(k-j+lambda) / (Gamma(lambda) j! (k-2j)!) (2u)^{k-2j};
// the sum of absolute terms bounds the cancellation error.
double gegenbauer_explicit(double lambda, unsigned k, double u, double* magnitude = nullptr) {
  double s = 0.0, m = 0.0;
  for (unsigned j = 0; 2 * j <= k; ++j) {
    const double term = std::exp(std::lgamma(k - j + lambda) - std::lgamma(lambda) - std::lgamma(j + 1.0) -
                                 std::lgamma(k - 2.0 * j + 1.0));
    const double t = term * std::pow(2.0 * u, static_cast<double>(k - 2 * j));
    s += j % 2 ? -t : t;
    m += std::abs(t);
  }
  if (magnitude) *magnitude = m;
  return s;
}

double binomial(double a, double b) {
  if (b < 0 || a < b) return 0.0;
  return std::round(std::exp(std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1)));
}

}  // namespace

TEST_CASE("dimension rejects n below 2") {
  CHECK_THROWS_AS(Dimension(1), std::invalid_argument);
  CHECK(Dimension(3).half() == 1.5);
}

TEST_CASE("pochhammer against gamma ratios") {
  for (double a : {0.5, 1.0, 2.75, 7.0}) {
    for (std::uint64_t k : {0u, 1u, 5u, 17u, 60u}) {
      const double oracle = std::exp(std::lgamma(a + k) - std::lgamma(a));
      CHECK(pochhammer(a, k) == doctest::Approx(oracle).epsilon(1e-12));
    }
  }
  CHECK(pochhammer(-2.5, 3) == doctest::Approx(-1.875));
  CHECK(pochhammer(-2.0, 3) == 0.0);
  CHECK(log_pochhammer(-2.5, 3).sign == -1.0);
  CHECK(log_pochhammer(-2.0, 5).sign == 0.0);
}

TEST_CASE("spherical harmonic dimensions") {
  for (int n = 2; n <= 7; ++n) {
    for (std::uint64_t k = 0; k < 40; ++k) {
      const double oracle = binomial(n + k - 1.0, static_cast<double>(k)) - binomial(n + k - 3.0, k - 2.0);
      CHECK(static_cast<double>(dim_spherical_harmonics(Dimension(n), k)) == oracle);
    }
  }
  CHECK(dim_spherical_harmonics(Dimension(3), 10) == 21);
  CHECK(harmonic_dimension_ratio(Dimension(2), 0) == 2.0);
  CHECK(harmonic_dimension_ratio(Dimension(2), 5) == 1.0);
}

TEST_CASE("gegenbauer recurrence matches the explicit sum") {
  for (double lambda : {0.5, 1.0, 1.5, 3.0}) {
    for (unsigned k = 0; k <= 20; ++k) {
      for (double u : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
        double magnitude = 0.0;
        const double oracle = gegenbauer_explicit(lambda, k, u, &magnitude);
        CHECK(std::abs(gegenbauer(lambda, k, u) - oracle) <= 1e-13 * (magnitude + 1.0));
      }
    }
  }
}

TEST_CASE("zonal harmonics in low dimensions") {
  const Point x{0.3, -0.5}, y{0.6, 0.2};
  const double theta = std::atan2(x[1], x[0]) - std::atan2(y[1], y[0]);
  CHECK(zonal(Dimension(2), 0, x, y) == 1.0);
  for (unsigned k = 1; k < 12; ++k) {
    const double oracle = 2.0 * std::pow(norm(x) * norm(y), k) * std::cos(k * theta);
    CHECK(zonal(Dimension(2), k, x, y) == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
  }
  const Point a{0.2, 0.4, -0.3}, b{-0.5, 0.1, 0.6};
  const double c = dot(a, b) / (norm(a) * norm(b));
  for (unsigned k = 0; k < 12; ++k) {
    const double oracle = (2.0 * k + 1.0) * std::pow(norm(a) * norm(b), k) * std::legendre(k, c);
    CHECK(zonal(Dimension(3), k, a, b) == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("zonal harmonic properties") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int n : {2, 3, 4, 6}) {
    Point z(static_cast<std::size_t>(n));
    for (auto& v : z) v = N(rng);
    const double r = norm(z);
    for (auto& v : z) v /= r;
    Point x(z.size()), y(z.size());
    for (auto& v : x) v = 0.3 * N(rng);
    for (auto& v : y) v = 0.3 * N(rng);
    for (unsigned k = 0; k < 9; ++k) {
      // Z_k(z, z) = h_k on the sphere
      CHECK(zonal(Dimension(n), k, z, z) ==
            doctest::Approx(static_cast<double>(dim_spherical_harmonics(Dimension(n), k))).epsilon(1e-12));
      CHECK(zonal(Dimension(n), k, x, y) == doctest::Approx(zonal(Dimension(n), k, y, x)).epsilon(1e-12).scale(1e-300));
      Point x2 = x;
      for (auto& v : x2) v *= 0.5;
      CHECK(zonal(Dimension(n), k, x2, y) ==
            doctest::Approx(std::pow(0.5, k) * zonal(Dimension(n), k, x, y)).epsilon(1e-11).scale(1e-300));
    }
  }
}

TEST_CASE("angular gap keeps precision for nearly parallel vectors") {
  const double eps = 1e-9;
  const Point x{1.0, 0.0, 0.0}, y{std::cos(eps), std::sin(eps), 0.0};
  CHECK(angular_gap(x, y) == doctest::Approx(2.0 * std::pow(std::sin(eps / 2.0), 2)).epsilon(1e-9));
  CHECK(angular_gap(x, Point{0.0, 0.0, 0.0}) == 0.0);
  CHECK(angular_gap(x, Point{-2.0, 0.0, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("weight constants are Beta functions") {
  for (int n : {2, 3, 5}) {
    for (double a : {-0.5, 0.0, 1.0, 2.5, 7.0}) {
      const double oracle = 0.5 * n * std::beta(0.5 * n, a + 1.0);
      CHECK(weight_constant(Dimension(n), a).value == doctest::Approx(oracle).epsilon(1e-13));
    }
    CHECK(weight_constant(Dimension(n), 0.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(weight_constant(Dimension(n), -1.0).value == 1.0);
    CHECK(weight_constant(Dimension(n), -3.0).value == 1.0);
  }
}
