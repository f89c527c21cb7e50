#include "hball/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hball/error.hpp"
#include "hball/parallel.hpp"

namespace hball {

namespace {

bool same_parameter(double a, double b) {
  return std::abs(a - b) <= 1e-13 * std::max({1.0, std::abs(a), std::abs(b)});
}

// gamma factors with matching parameters and opposite exponents cancel.
std::vector<GammaFactor> simplify(std::vector<GammaFactor> in) {
  std::vector<GammaFactor> out;
  for (const auto& f : in) {
    auto it = std::find_if(out.begin(), out.end(), [&](const GammaFactor& g) {
      return g.exponent == -f.exponent && same_parameter(g.alpha, f.alpha);
    });
    if (it != out.end()) {
      out.erase(it);
    } else {
      out.push_back(f);
    }
  }
  return out;
}

std::vector<GammaFactor> series_factors(double sigma, const std::vector<DiffPair>& multipliers) {
  std::vector<GammaFactor> f{{sigma, 1}};
  for (const auto& m : multipliers) {
    f.push_back({m.s + m.t, 1});
    f.push_back({m.s, -1});
  }
  return simplify(std::move(f));
}

// Chains (s, t1), (s + t1, t2) collapse to (s, t1 + t2); zero-order steps vanish.
std::vector<DiffPair> merge_chain(const std::vector<DiffPair>& in) {
  std::vector<DiffPair> out;
  for (const auto& m : in) {
    if (!out.empty() && same_parameter(out.back().s + out.back().t, m.s)) {
      out.back().t += m.t;
      if (same_parameter(out.back().t, 0.0)) out.pop_back();
    } else if (!same_parameter(m.t, 0.0)) {
      out.push_back(m);
    }
  }
  return out;
}

void check_pole(Dimension n, const Point& pole, bool on_sphere) {
  if (pole.size() != static_cast<std::size_t>(n.value())) throw std::invalid_argument("atom pole has wrong dimension");
  const double r = norm(pole);
  if (on_sphere) {
    if (std::abs(r - 1.0) > 1e-12) throw std::invalid_argument("zonal term pole must lie on the unit sphere");
  } else if (r > 1.0 + 1e-12) {
    throw std::invalid_argument("kernel atom pole must satisfy |pole| <= 1");
  }
}

}  // namespace

const Point& Atom::pole() const {
  return std::visit([](const auto& a) -> const Point& { return a.pole; }, kind);
}

HarmonicExpansion::HarmonicExpansion(Dimension n, std::vector<Atom> atoms) : n_(n), atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.weight)) throw std::invalid_argument("atom weight must be finite");
    check_pole(n_, a.pole(), std::holds_alternative<ZonalTerm>(a.kind));
  }
}

HarmonicExpansion HarmonicExpansion::scaled(double c) const {
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.weight *= c;
  return {n_, std::move(out)};
}

HarmonicExpansion HarmonicExpansion::combined(double a, const HarmonicExpansion& other, double b) const {
  if (!(other.n_ == n_)) throw std::invalid_argument("cannot combine expansions of different dimensions");
  std::vector<Atom> out = scaled(a).atoms_;
  for (auto atom : other.atoms_) {
    atom.weight *= b;
    out.push_back(std::move(atom));
  }
  return {n_, std::move(out)};
}

CoefficientSequence atom_coefficients(Dimension n, const Atom& a) {
  if (const auto* k = std::get_if<KernelAtom>(&a.kind)) return CoefficientSequence::kernel(n, k->s);
  if (const auto* s = std::get_if<SeriesAtom>(&a.kind)) return {n, series_factors(s->sigma, s->multipliers)};
  throw std::invalid_argument("atom_coefficients: zonal terms have no coefficient sequence");
}

namespace {

double evaluate_atom(Dimension n, const Atom& a, std::span<const double> x, Tolerance tol) {
  if (a.weight == 0.0) return 0.0;
  if (const auto* z = std::get_if<ZonalTerm>(&a.kind)) {
    return a.weight * zonal(n, static_cast<unsigned>(z->k), x, z->pole);
  }
  const Point& q = a.pole();
  const CoefficientSequence c = atom_coefficients(n, a);
  const Tolerance scaled{tol.abs / std::abs(a.weight), tol.rel};
  return a.weight * zonal_series(c, norm(x) * norm(q), angular_gap(x, q), scaled).value;
}

}  // namespace

double evaluate(const HarmonicExpansion& f, std::span<const double> x, Tolerance tol) {
  if (x.size() != static_cast<std::size_t>(f.dimension().value())) throw std::invalid_argument("evaluate: point dimension mismatch");
  if (norm(x) > 1.0 + 1e-12) throw std::invalid_argument("evaluate: point outside the closed ball");
  double sum = 0.0;
  for (const auto& a : f.atoms()) sum += evaluate_atom(f.dimension(), a, x, tol);
  return sum;
}

double evaluate(const HarmonicExpansion& f, std::span<const double> x, double tol) {
  return evaluate(f, x, Tolerance{tol, 0.0});
}

HarmonicExpansion apply_D(const HarmonicExpansion& f, DiffPair pair) {
  if (pair.t == 0.0) return f;
  const Dimension n = f.dimension();
  std::vector<Atom> out;
  out.reserve(f.atoms().size());
  for (const auto& a : f.atoms()) {
    if (const auto* z = std::get_if<ZonalTerm>(&a.kind)) {
      out.push_back({*z, a.weight * gamma_ratio(n, pair.s, pair.t, z->k)});
      continue;
    }
    double sigma;
    std::vector<DiffPair> chain;
    if (const auto* k = std::get_if<KernelAtom>(&a.kind)) {
      sigma = k->s;
    } else {
      const auto& s = std::get<SeriesAtom>(a.kind);
      sigma = s.sigma;
      chain = s.multipliers;
    }
    chain.push_back(pair);
    chain = merge_chain(chain);
    const auto factors = series_factors(sigma, chain);
    if (factors.size() == 1 && factors[0].exponent == 1) {
      out.push_back({KernelAtom{factors[0].alpha, a.pole()}, a.weight});
    } else {
      out.push_back({SeriesAtom{sigma, a.pole(), std::move(chain)}, a.weight});
    }
  }
  return {n, std::move(out)};
}

double apply_I(const HarmonicExpansion& f, DiffPair pair, std::span<const double> x, double tol) {
  const double r2 = dot(x, x);
  if (r2 >= 1.0) throw std::invalid_argument("apply_I: point must lie inside the ball");
  return std::pow(1.0 - r2, pair.t) * evaluate(apply_D(f, pair), x, tol);
}

std::vector<std::pair<Point, double>> homogeneous_coefficient(const HarmonicExpansion& f, std::uint64_t k) {
  std::vector<std::pair<Point, double>> out;
  for (const auto& a : f.atoms()) {
    if (const auto* z = std::get_if<ZonalTerm>(&a.kind)) {
      if (z->k == k) out.emplace_back(z->pole, a.weight);
      continue;
    }
    out.emplace_back(a.pole(), a.weight * atom_coefficients(f.dimension(), a).at(k));
  }
  return out;
}

namespace {

bool on_focus_ray(const Point& q, const Point& focus) {
  const double c = dot(q, focus);
  if (c < 0.0) return norm(q) == 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) off += (q[i] - c * focus[i]) * (q[i] - c * focus[i]);
  return std::sqrt(off) <= 1e-14;
}

std::vector<double> sample_shell(const ShellDecomposition& d, const Shell& s, const HarmonicExpansion& f,
                                 Tolerance tol) {
  const Dimension n = f.dimension();
  std::vector<double> values(s.size(), 0.0);
  const std::size_t P = s.polar.size();
  std::vector<const Atom*> general;
  for (const auto& a : f.atoms()) {
    if (a.weight == 0.0) continue;
    if (std::holds_alternative<ZonalTerm>(a.kind) || !on_focus_ray(a.pole(), d.focus())) {
      general.push_back(&a);
      continue;
    }
    const CoefficientSequence c = atom_coefficients(n, a);
    const Tolerance scaled{tol.abs / std::abs(a.weight), tol.rel};
    const double qn = norm(a.pole());
    std::vector<double> grid(s.radii.size() * P);
    const std::size_t chunks = std::min(worker_count(), P);
    parallel_for(chunks, [&](std::size_t ch) {
      const std::size_t lo = P * ch / chunks;
      const std::size_t hi = P * (ch + 1) / chunks;
      std::vector<double> part(s.radii.size() * (hi - lo));
      zonal_series_grid(c, qn, s.radii, std::span(s.polar_gaps).subspan(lo, hi - lo), scaled, part);
      for (std::size_t i = 0; i < s.radii.size(); ++i) {
        for (std::size_t p = lo; p < hi; ++p) grid[i * P + p] = part[i * (hi - lo) + (p - lo)];
      }
    });
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      for (std::size_t p = 0; p < P; ++p) {
        const double v = a.weight * grid[i * P + p];
        for (std::size_t k = 0; k < s.around; ++k) values[s.index(i, p, k)] += v;
      }
    }
  }
  if (!general.empty()) {
    const std::size_t per_radius = P * s.around;
    parallel_for(s.size(), [&](std::size_t idx) {
      const Point x = d.node(s, idx / per_radius, (idx % per_radius) / s.around, idx % s.around);
      double v = 0.0;
      for (const Atom* a : general) v += evaluate_atom(n, *a, x, tol);
      values[idx] += v;
    });
  }
  return values;
}

}  // namespace

ShellField sample_expansion(const ShellDecomposition& d, const HarmonicExpansion& f, Tolerance tol) {
  if (!(d.dimension() == f.dimension())) throw std::invalid_argument("sample_expansion: dimension mismatch");
  ShellField field;
  field.origin = evaluate(f, Point(static_cast<std::size_t>(f.dimension().value()), 0.0), tol);
  for (std::size_t j = 0; j < d.shell_count(); ++j) {
    try {
      field.shells.push_back(sample_shell(d, d.shell(j), f, tol));
    } catch (const NonConvergent& e) {
      field.truncated = true;
      field.truncation_reason = e.what();
      return field;
    }
  }
  if (d.closing()) {
    try {
      field.closing = sample_shell(d, *d.closing(), f, tol);
    } catch (const NonConvergent& e) {
      field.truncated = true;
      field.truncation_reason = e.what();
    }
  }
  return field;
}

}  // namespace hball
