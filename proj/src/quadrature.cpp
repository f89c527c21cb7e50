#include "hball/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hball/error.hpp"
#include "hball/parallel.hpp"

namespace hball {

namespace {

struct JacobiRecurrence {
  std::vector<double> alpha;  // alpha_k, k = 0..m-1
  std::vector<double> beta;   // beta_k, k = 0..m; beta_0 = mu_0
};

// Monic Jacobi recurrence p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}.
JacobiRecurrence jacobi_recurrence(std::size_t m, double a, double b) {
  JacobiRecurrence r;
  r.alpha.resize(m);
  r.beta.resize(m + 1);
  const double ab = a + b;
  r.beta[0] = std::exp((ab + 1.0) * std::numbers::ln2 + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                       std::lgamma(ab + 2.0));
  for (std::size_t k = 0; k < m; ++k) {
    if (k == 0) {
      r.alpha[k] = (b - a) / (ab + 2.0);
    } else {
      const double s = 2.0 * k + ab;
      r.alpha[k] = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (std::size_t k = 1; k <= m; ++k) {
    if (k == 1) {
      r.beta[k] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      const double kk = static_cast<double>(k);
      const double s = 2.0 * kk + ab;
      r.beta[k] = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
  }
  return r;
}

}  // namespace

Rule1D gauss_jacobi(std::size_t m, double a, double b) {
  if (m == 0) throw std::invalid_argument("gauss_jacobi: need at least one node");
  if (!(a > -1.0) || !(b > -1.0)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  const JacobiRecurrence rec = jacobi_recurrence(m, a, b);

  Eigen::VectorXd diag(m);
  Eigen::VectorXd sub(m > 1 ? m - 1 : 0);
  for (std::size_t k = 0; k < m; ++k) diag(k) = rec.alpha[k];
  for (std::size_t k = 1; k < m; ++k) sub(k - 1) = std::sqrt(rec.beta[k]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: eigenvalue solver failed");

  Rule1D rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 3; ++it) {
      double p0 = 0.0, p1 = 1.0, d0 = 0.0, d1 = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double p2 = (x - rec.alpha[k]) * p1 - (k > 0 ? rec.beta[k] * p0 : 0.0);
        const double d2 = p1 + (x - rec.alpha[k]) * d1 - (k > 0 ? rec.beta[k] * d0 : 0.0);
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
      }
      if (d1 == 0.0) break;
      const double step = p1 / d1;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    // Christoffel weight from the orthonormal polynomials.
    double q0 = 0.0, q1 = 1.0 / std::sqrt(rec.beta[0]);
    double sum = q1 * q1;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double q2 = ((x - rec.alpha[k]) * q1 - (k > 0 ? std::sqrt(rec.beta[k]) * q0 : 0.0)) /
                        std::sqrt(rec.beta[k + 1]);
      q0 = q1;
      q1 = q2;
      sum += q1 * q1;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sum;
  }
  return rule;
}

Rule1D gauss_legendre(std::size_t m) { return gauss_jacobi(m, 0.0, 0.0); }

Rule1D gauss_legendre(std::size_t m, double lo, double hi) {
  Rule1D r = gauss_legendre(m);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < m; ++i) {
    r.nodes[i] = lo + half * (1.0 + r.nodes[i]);
    r.weights[i] *= half;
  }
  return r;
}

void sphere_rule(Dimension n, std::size_t degree, std::vector<Point>& directions, std::vector<double>& weights) {
  directions.clear();
  weights.clear();
  const double two_pi = 2.0 * std::numbers::pi;
  const std::size_t M = degree + 1;
  if (n.value() == 2) {
    for (std::size_t j = 0; j < M; ++j) {
      const double phi = two_pi * static_cast<double>(j) / static_cast<double>(M);
      directions.push_back({std::cos(phi), std::sin(phi)});
      weights.push_back(1.0 / static_cast<double>(M));
    }
    return;
  }
  if (n.value() != 3) throw std::invalid_argument("quadrature supports n = 2 and n = 3 only");
  const Rule1D polar = gauss_legendre((degree + 2) / 2);
  for (std::size_t p = 0; p < polar.nodes.size(); ++p) {
    const double t = polar.nodes[p];
    const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (std::size_t j = 0; j < M; ++j) {
      const double psi = two_pi * static_cast<double>(j) / static_cast<double>(M);
      directions.push_back({st * std::cos(psi), st * std::sin(psi), t});
      weights.push_back(0.5 * polar.weights[p] / static_cast<double>(M));
    }
  }
}

BallQuadrature::BallQuadrature(Dimension n, double gamma, std::size_t radial_nodes, std::size_t sphere_degree)
    : n_(n), gamma_(gamma), degree_(sphere_degree) {
  if (!(gamma > -1.0)) throw std::invalid_argument("BallQuadrature: gamma must exceed -1");
  const double b = n.half() - 1.0;
  const Rule1D rule = gauss_jacobi(radial_nodes, gamma, b);
  const double scale = n.half() * std::exp(-(gamma + b + 1.0) * std::numbers::ln2);
  for (std::size_t i = 0; i < radial_nodes; ++i) {
    const double u = 0.5 * (1.0 + rule.nodes[i]);
    radii_.push_back(std::sqrt(u));
    radial_weights_.push_back(scale * rule.weights[i]);
  }
  sphere_rule(n, sphere_degree, directions_, direction_weights_);
}

Point BallQuadrature::node(std::size_t index) const {
  const std::size_t i = index / directions_.size();
  const std::size_t j = index % directions_.size();
  Point x = directions_[j];
  for (double& v : x) v *= radii_[i];
  return x;
}

double BallQuadrature::weight(std::size_t index) const {
  return radial_weights_[index / directions_.size()] * direction_weights_[index % directions_.size()];
}

double integrate_ball(const BallQuadrature& q, const BallFunction& g) {
  std::vector<double> terms(q.size());
  parallel_for(q.size(), [&](std::size_t idx) {
    const Point x = q.node(idx);
    double v;
    try {
      v = g(x);
    } catch (const std::exception& e) {
      throw EvaluationFailure("integrand failed at quadrature node " + std::to_string(idx) + ": " + e.what());
    }
    terms[idx] = v * q.weight(idx);
  });
  return pairwise_sum(terms);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Finite:
      return "Finite";
    case Verdict::Divergent:
      return "Divergent";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

ShellDecomposition::ShellDecomposition(Dimension n, ShellOptions options) : n_(n), options_(std::move(options)) {
  if (n.value() != 2 && n.value() != 3) throw std::invalid_argument("shell decomposition supports n = 2 and n = 3 only");
  const auto dim = static_cast<std::size_t>(n.value());
  if (options_.focus.empty()) {
    options_.focus.assign(dim, 0.0);
    options_.focus[0] = 1.0;
  }
  if (options_.focus.size() != dim) throw std::invalid_argument("shell focus has wrong dimension");
  const double fn = norm(options_.focus);
  if (fn == 0.0) throw std::invalid_argument("shell focus must be nonzero");
  for (double& v : options_.focus) v /= fn;
  if (options_.shells == 0 || options_.radial_nodes == 0 || options_.polar_nodes == 0) {
    throw std::invalid_argument("shell decomposition needs positive node counts");
  }
  if (n.value() == 3 && options_.azimuth_nodes == 0) throw std::invalid_argument("azimuth_nodes must be positive");

  // Gram-Schmidt on the standard basis for the complement of the focus.
  for (std::size_t e = 0; e < dim && frame_.size() + 1 < dim; ++e) {
    Point v(dim, 0.0);
    v[e] = 1.0;
    auto project_out = [&](const Point& u) {
      const double c = dot(v, u);
      for (std::size_t i = 0; i < dim; ++i) v[i] -= c * u[i];
    };
    project_out(options_.focus);
    for (const auto& f : frame_) project_out(f);
    const double vn = norm(v);
    if (vn < 1e-8) continue;
    for (double& c : v) c /= vn;
    frame_.push_back(v);
  }

  for (std::size_t j = 0; j < options_.shells; ++j) {
    const double lo = j == 0 ? 0.0 : 1.0 - std::ldexp(1.0, -static_cast<int>(j));
    const double hi = 1.0 - std::ldexp(1.0, -static_cast<int>(j) - 1);
    shells_.push_back(build_shell(j, lo, hi, false));
  }
  if (options_.closing_exponent) {
    closing_ = build_shell(options_.shells, 1.0 - std::ldexp(1.0, -static_cast<int>(options_.shells)), 1.0, true);
  }
}

Shell ShellDecomposition::build_shell(std::size_t j, double lo, double hi, bool closing) const {
  Shell s;
  s.j = j;
  s.closing = closing;
  s.r_lo = lo;
  s.r_hi = hi;
  const double d = n_.value();
  if (closing) {
    // integral over s = 1 - r in [0, h] of s^e g(1 - s) ds.
    const double e = *options_.closing_exponent;
    const double h = hi - lo;
    const Rule1D rule = gauss_jacobi(options_.radial_nodes, 0.0, e);
    const double scale = std::pow(0.5 * h, e + 1.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double r = 1.0 - 0.5 * h * (1.0 + rule.nodes[i]);
      s.radii.push_back(r);
      s.radial_weights.push_back(scale * rule.weights[i] * d * std::pow(r, d - 1.0));
    }
  } else {
    const Rule1D rule = gauss_legendre(options_.radial_nodes, lo, hi);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s.radii.push_back(rule.nodes[i]);
      s.radial_weights.push_back(rule.weights[i] * d * std::pow(rule.nodes[i], d - 1.0));
    }
  }

  const double width = std::max(std::ldexp(1.0, -static_cast<int>(j)), options_.min_panel);
  const double base = options_.grading * width;
  std::vector<double> edges{0.0};
  double e = base;
  while (e < std::numbers::pi) {
    edges.push_back(e);
    e *= 2.0;
  }
  edges.push_back(std::numbers::pi);
  s.around = n_.value() == 2 ? 2 : options_.azimuth_nodes;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const Rule1D rule = gauss_legendre(options_.polar_nodes, edges[k], edges[k + 1]);
    for (std::size_t p = 0; p < rule.nodes.size(); ++p) {
      const double phi = rule.nodes[p];
      const double sh = std::sin(0.5 * phi);
      s.polar.push_back(phi);
      s.polar_gaps.push_back(2.0 * sh * sh);
      if (n_.value() == 2) {
        s.polar_weights.push_back(rule.weights[p] / (2.0 * std::numbers::pi));
      } else {
        s.polar_weights.push_back(0.5 * rule.weights[p] * std::sin(phi) / static_cast<double>(s.around));
      }
    }
  }
  return s;
}

Point ShellDecomposition::node(const Shell& s, std::size_t i, std::size_t p, std::size_t a) const {
  const double r = s.radii[i];
  const double phi = s.polar[p];
  const double c = std::cos(phi);
  const double sn = std::sin(phi);
  Point x(options_.focus.size());
  if (n_.value() == 2) {
    const double side = a == 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = r * (c * options_.focus[k] + side * sn * frame_[0][k]);
  } else {
    const double psi = 2.0 * std::numbers::pi * (static_cast<double>(a) + 0.5) / static_cast<double>(s.around);
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = r * (c * options_.focus[k] + sn * (cp * frame_[0][k] + sp * frame_[1][k]));
    }
  }
  return x;
}

double ShellDecomposition::weight(const Shell& s, std::size_t i, std::size_t p, std::size_t) const {
  return s.radial_weights[i] * s.polar_weights[p];
}

namespace {

std::vector<double> sample_shell(const ShellDecomposition& d, const Shell& s, const BallFunction& g) {
  std::vector<double> values(s.size());
  const std::size_t per_radius = s.polar.size() * s.around;
  parallel_for(s.size(), [&](std::size_t idx) {
    const std::size_t i = idx / per_radius;
    const std::size_t p = (idx % per_radius) / s.around;
    const std::size_t a = idx % s.around;
    values[idx] = g(d.node(s, i, p, a));
  });
  return values;
}

}  // namespace

ShellField sample_field(const ShellDecomposition& d, const BallFunction& g) {
  ShellField field;
  field.origin = g(Point(static_cast<std::size_t>(d.dimension().value()), 0.0));
  for (std::size_t j = 0; j < d.shell_count(); ++j) {
    try {
      field.shells.push_back(sample_shell(d, d.shell(j), g));
    } catch (const NonConvergent& e) {
      field.truncated = true;
      field.truncation_reason = e.what();
      return field;
    }
  }
  if (d.closing()) {
    try {
      field.closing = sample_shell(d, *d.closing(), g);
    } catch (const NonConvergent& e) {
      field.truncated = true;
      field.truncation_reason = e.what();
    }
  }
  return field;
}

Verdict classify_increments(std::span<const double> increments, VerdictRule rule) {
  if (increments.size() < rule.window || rule.window < 2) return Verdict::Inconclusive;
  std::vector<double> tail(increments.end() - static_cast<std::ptrdiff_t>(rule.window), increments.end());
  for (double& v : tail) v = v < rule.floor ? 0.0 : v;
  if (tail.back() == 0.0) return Verdict::Finite;
  bool all_small = true;
  bool all_large = true;
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
    double ratio;
    if (tail[i] == 0.0) {
      ratio = tail[i + 1] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio = tail[i + 1] / tail[i];
    }
    all_small = all_small && ratio <= rule.finite_ratio;
    all_large = all_large && ratio >= rule.divergent_ratio;
  }
  if (all_small) return Verdict::Finite;
  if (all_large) return Verdict::Divergent;
  return Verdict::Inconclusive;
}

namespace {

double shell_integral(const Shell& s, std::span<const double> values, double weight_exponent) {
  std::vector<double> terms(s.size());
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    const double r = s.radii[i];
    const double w = s.closing ? std::pow(1.0 + r, weight_exponent)
                               : std::pow((1.0 - r) * (1.0 + r), weight_exponent);
    const double rw = w * s.radial_weights[i];
    for (std::size_t p = 0; p < s.polar.size(); ++p) {
      for (std::size_t a = 0; a < s.around; ++a) {
        const std::size_t idx = s.index(i, p, a);
        terms[idx] = values[idx] == 0.0 ? 0.0 : values[idx] * rw * s.polar_weights[p];
      }
    }
  }
  return pairwise_sum(terms);
}

}  // namespace

ShellReport integrate_shells(const ShellDecomposition& d, const ShellField& g, double weight_exponent,
                             VerdictRule rule) {
  ShellReport report;
  report.truncated = g.truncated;
  std::vector<double> increments;
  double partial = 0.0;
  for (std::size_t j = 0; j < g.evaluated(); ++j) {
    const double inc = shell_integral(d.shell(j), g.shells[j], weight_exponent);
    partial += inc;
    increments.push_back(inc);
    report.shells.push_back({j, inc, partial});
  }
  report.total = partial;
  if (g.closing) {
    if (!d.closing() || weight_exponent != *d.options().closing_exponent) {
      throw std::invalid_argument("integrate_shells: weight exponent does not match the closing rule");
    }
    report.closing = shell_integral(*d.closing(), *g.closing, weight_exponent);
    report.total += *report.closing;
  }
  report.verdict = classify_increments(increments, rule);
  return report;
}

ShellReport integrate_shells(const ShellDecomposition& d, const BallFunction& g, double weight_exponent,
                             VerdictRule rule) {
  return integrate_shells(d, sample_field(d, g), weight_exponent, rule);
}

SupNormProbe sup_norm_probe(const ShellDecomposition& d, const ShellField& g, double alpha_plus_t) {
  SupNormProbe probe;
  probe.truncated = g.truncated;
  probe.sup = std::abs(g.origin);
  for (std::size_t j = 0; j < g.evaluated(); ++j) {
    const Shell& s = d.shell(j);
    const std::size_t per_radius = s.polar.size() * s.around;
    double best = 0.0;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      const double r = s.radii[i];
      const double w = std::pow((1.0 - r) * (1.0 + r), alpha_plus_t);
      for (std::size_t k = 0; k < per_radius; ++k) best = std::max(best, w * std::abs(g.shells[j][i * per_radius + k]));
    }
    probe.shell_maxima.push_back(best);
    probe.sup = std::max(probe.sup, best);
  }
  return probe;
}

SupNormProbe sup_norm_probe(const BallFunction& g, double alpha_plus_t, const ShellDecomposition& d) {
  return sup_norm_probe(d, sample_field(d, g), alpha_plus_t);
}

}  // namespace hball
