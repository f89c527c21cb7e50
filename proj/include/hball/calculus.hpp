#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "hball/kernel.hpp"
#include "hball/quadrature.hpp"
#include "hball/special.hpp"

namespace hball {

struct DiffPair {
  double s = 0.0;
  double t = 0.0;
};

/// R_s(., pole), |pole| <= 1.
struct KernelAtom {
  double s;
  Point pole;
};

/// Z_k(., pole), |pole| = 1: a homogeneous harmonic polynomial of degree k.
struct ZonalTerm {
  std::uint64_t k;
  Point pole;
};

/// sum_k gamma_k(sigma) prod_i [gamma_k(s_i + t_i) / gamma_k(s_i)] Z_k(., pole):
/// the image of R_sigma(., pole) under D operators whose subscript differs
/// from sigma.
struct SeriesAtom {
  double sigma;
  Point pole;
  std::vector<DiffPair> multipliers;
};

struct Atom {
  std::variant<KernelAtom, ZonalTerm, SeriesAtom> kind;
  double weight = 1.0;

  const Point& pole() const;
};

/// Finite sum of weighted atoms; immutable once built.
class HarmonicExpansion {
 public:
  HarmonicExpansion(Dimension n, std::vector<Atom> atoms);

  Dimension dimension() const noexcept { return n_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  HarmonicExpansion scaled(double c) const;
  /// Concatenation of a * this and b * other.
  HarmonicExpansion combined(double a, const HarmonicExpansion& other, double b) const;

 private:
  Dimension n_;
  std::vector<Atom> atoms_;
};

/// Coefficient sequence c_k of a kernel or series atom (weight excluded), so
/// that the atom is weight * sum_k c_k Z_k(., pole). Zonal terms are rejected.
CoefficientSequence atom_coefficients(Dimension n, const Atom& a);

/// f(x). Kernel and series atoms use a certified truncation with absolute
/// error at most tol per atom.
double evaluate(const HarmonicExpansion& f, std::span<const double> x, double tol = 1e-12);
double evaluate(const HarmonicExpansion& f, std::span<const double> x, Tolerance tol);

HarmonicExpansion apply_D(const HarmonicExpansion& f, DiffPair pair);

/// (1 - |x|^2)^t D^t_s f(x).
double apply_I(const HarmonicExpansion& f, DiffPair pair, std::span<const double> x, double tol = 1e-12);

/// Degree-k layer of f as (pole, coefficient) pairs: f_k = sum coef Z_k(., pole).
std::vector<std::pair<Point, double>> homogeneous_coefficient(const HarmonicExpansion& f, std::uint64_t k);

/// Values of f on every node of a shell decomposition. Atoms whose pole lies
/// on the focus ray are summed on the (radius, polar angle) grid once and
/// broadcast around the axis; other atoms are evaluated node by node.
/// Sampling stops at the first shell that cannot be certified.
ShellField sample_expansion(const ShellDecomposition& d, const HarmonicExpansion& f, Tolerance tol);

}  // namespace hball
