#include "hball/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hball/error.hpp"
#include "hball/parallel.hpp"

namespace hball {

namespace {

double cmp_tol(double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }
bool strictly_less(double a, double b) { return a < b - cmp_tol(a, b); }
bool less_or_equal(double a, double b) { return a <= b + cmp_tol(a, b); }

bool is_bloch(SpaceKind k) { return k == SpaceKind::Bloch || k == SpaceKind::LittleBloch; }

}  // namespace

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::BergmanBesov:
      return "BergmanBesov";
    case SpaceKind::Bloch:
      return "Bloch";
    case SpaceKind::LittleBloch:
      return "LittleBloch";
  }
  return "BergmanBesov";
}

DiffPair default_pair(SpaceKind kind, double p, double alpha) {
  double t;
  if (kind == SpaceKind::BergmanBesov) {
    if (!(p > 0.0)) throw std::invalid_argument("default_pair: p must be positive");
    t = std::max(0.0, std::ceil((-1.0 - alpha) / p) + 1.0);
  } else {
    t = std::max(1.0, std::ceil(-alpha) + 1.0);
  }
  return {alpha + t, t};
}

SpaceSpec SpaceSpec::bergman_besov(double p, double alpha) {
  return bergman_besov(p, alpha, default_pair(SpaceKind::BergmanBesov, p, alpha));
}
SpaceSpec SpaceSpec::bergman_besov(double p, double alpha, DiffPair pair) {
  return {SpaceKind::BergmanBesov, p, alpha, pair};
}
SpaceSpec SpaceSpec::bloch(double alpha) { return bloch(alpha, default_pair(SpaceKind::Bloch, 0.0, alpha)); }
SpaceSpec SpaceSpec::bloch(double alpha, DiffPair pair) {
  return {SpaceKind::Bloch, std::numeric_limits<double>::infinity(), alpha, pair};
}
SpaceSpec SpaceSpec::little_bloch(double alpha) {
  return little_bloch(alpha, default_pair(SpaceKind::LittleBloch, 0.0, alpha));
}
SpaceSpec SpaceSpec::little_bloch(double alpha, DiffPair pair) {
  return {SpaceKind::LittleBloch, std::numeric_limits<double>::infinity(), alpha, pair};
}

bool SpaceSpec::admissible() const {
  if (kind == SpaceKind::BergmanBesov) return p > 0.0 && std::isfinite(p) && alpha + p * pair.t > -1.0;
  return alpha + pair.t > 0.0;
}

void SpaceSpec::validate() const {
  if (admissible()) return;
  if (kind == SpaceKind::BergmanBesov) {
    throw AdmissibilityError("Bergman-Besov space needs p > 0 and alpha + p t > -1 (p = " + std::to_string(p) +
                             ", alpha = " + std::to_string(alpha) + ", t = " + std::to_string(pair.t) + ")");
  }
  throw AdmissibilityError("Bloch space needs alpha + t > 0 (alpha = " + std::to_string(alpha) +
                           ", t = " + std::to_string(pair.t) + ")");
}

double besov_norm(const HarmonicExpansion& f, const SpaceSpec& spec, const BallQuadrature& q, double tol) {
  if (spec.kind != SpaceKind::BergmanBesov) throw std::invalid_argument("besov_norm: spec must be Bergman-Besov");
  spec.validate();
  const double gamma = spec.alpha + spec.p * spec.pair.t;
  if (std::abs(q.gamma() - gamma) > 1e-12 * std::max(1.0, std::abs(gamma))) {
    throw std::invalid_argument("besov_norm: quadrature weight must equal alpha + p t");
  }
  const HarmonicExpansion df = apply_D(f, spec.pair);
  const double p = spec.p;
  const double integral = integrate_ball(q, [&](std::span<const double> x) {
    return std::pow(std::abs(evaluate(df, x, tol)), p);
  });
  return std::pow(integral / weight_constant(f.dimension(), spec.alpha).value, 1.0 / p);
}

ShellReport besov_shells(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d,
                         Tolerance tol) {
  if (spec.kind != SpaceKind::BergmanBesov) throw std::invalid_argument("besov_shells: spec must be Bergman-Besov");
  spec.validate();
  ShellField field = sample_expansion(d, apply_D(f, spec.pair), tol);
  const double scale = 1.0 / weight_constant(f.dimension(), spec.alpha).value;
  auto transform = [&](double v) { return std::pow(std::abs(v), spec.p) * scale; };
  field.origin = transform(field.origin);
  for (auto& s : field.shells) std::transform(s.begin(), s.end(), s.begin(), transform);
  if (field.closing) std::transform(field.closing->begin(), field.closing->end(), field.closing->begin(), transform);
  return integrate_shells(d, field, spec.alpha + spec.p * spec.pair.t);
}

WeightedField weighted_field(const HarmonicExpansion& f, double alpha, DiffPair pair, const ShellDecomposition& d,
                             Tolerance tol) {
  SpaceSpec::bloch(alpha, pair).validate();
  WeightedField w;
  w.grid = &d;
  w.alpha = alpha;
  w.pair = pair;
  w.values = sample_expansion(d, apply_D(f, pair), tol);
  auto absolute = [](double v) { return std::abs(v); };
  w.values.origin = std::abs(w.values.origin);
  for (auto& s : w.values.shells) std::transform(s.begin(), s.end(), s.begin(), absolute);
  w.probe = sup_norm_probe(d, w.values, alpha + pair.t);
  return w;
}

double bloch_norm(const WeightedField& w) { return w.probe.sup; }

double bloch_norm(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d) {
  if (!is_bloch(spec.kind)) throw std::invalid_argument("bloch_norm: spec must be Bloch or little Bloch");
  spec.validate();
  return bloch_norm(weighted_field(f, spec.alpha, spec.pair, d));
}

std::string to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::Decaying:
      return "Decaying";
    case DecayVerdict::NonDecaying:
      return "NonDecaying";
    case DecayVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

DecayVerdict little_bloch_test(const WeightedField& w, DecayRule rule) {
  const auto& m = w.probe.shell_maxima;
  if (w.probe.sup == 0.0) return DecayVerdict::Decaying;
  if (m.size() < rule.window || m.empty()) return DecayVerdict::Inconclusive;
  const double m0 = m.front();
  const auto tail_begin = m.end() - static_cast<std::ptrdiff_t>(rule.window);
  const bool monotone = std::is_sorted(tail_begin, m.end(), std::greater<>());
  if (m.back() < rule.decayed * m0 && monotone) return DecayVerdict::Decaying;
  const auto [lo, hi] = std::minmax_element(tail_begin, m.end());
  if (*lo >= rule.persists * m0 && *hi <= rule.stable_spread * *lo) return DecayVerdict::NonDecaying;
  return DecayVerdict::Inconclusive;
}

DecayVerdict little_bloch_test(const HarmonicExpansion& f, const SpaceSpec& spec, const ShellDecomposition& d) {
  if (!is_bloch(spec.kind)) throw std::invalid_argument("little_bloch_test: spec must be Bloch or little Bloch");
  spec.validate();
  return little_bloch_test(weighted_field(f, spec.alpha, spec.pair, d));
}

LevelSetReport level_set(const WeightedField& w, double epsilon, double weight_exponent, VerdictRule rule) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("level_set: epsilon must be positive");
  const ShellDecomposition& d = *w.grid;
  const double apt = w.alpha + w.pair.t;
  LevelSetReport report;
  report.epsilon = epsilon;
  report.pair = w.pair;
  report.alpha = w.alpha;
  report.weight_exponent = weight_exponent;
  ShellField indicator;
  indicator.truncated = w.values.truncated;
  indicator.truncation_reason = w.values.truncation_reason;
  indicator.origin = w.values.origin >= epsilon ? 1.0 : 0.0;
  for (std::size_t j = 0; j < w.values.evaluated(); ++j) {
    const Shell& s = d.shell(j);
    const std::size_t per_radius = s.polar.size() * s.around;
    std::vector<double> ind(s.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      const double r = s.radii[i];
      const double weight = std::pow((1.0 - r) * (1.0 + r), apt);
      for (std::size_t k = 0; k < per_radius; ++k) {
        const bool in = weight * w.values.shells[j][i * per_radius + k] >= epsilon;
        ind[i * per_radius + k] = in ? 1.0 : 0.0;
        count += in ? 1 : 0;
      }
    }
    report.members.push_back(count);
    report.nodes.push_back(s.size());
    indicator.shells.push_back(std::move(ind));
  }
  report.integral = integrate_shells(d, indicator, weight_exponent, rule);
  return report;
}

LevelSetReport level_set(const HarmonicExpansion& f, double alpha, DiffPair pair, double epsilon,
                         const ShellDecomposition& d, double weight_exponent) {
  return level_set(weighted_field(f, alpha, pair, d), epsilon, weight_exponent);
}

std::string to_string(Membership m) { return m == Membership::Member ? "Member" : "NonMember"; }

Membership membership_kernel_atom(Dimension n, double p, double s, double beta) {
  if (!(p > 0.0)) throw std::invalid_argument("membership_kernel_atom: p must be positive");
  const double lhs = beta + n.value();
  const double rhs = p * (n.value() + s);
  return strictly_less(rhs, lhs) ? Membership::Member : Membership::NonMember;
}

std::string to_string(Inclusion i) { return i == Inclusion::Included ? "Included" : "NotIncluded"; }

Inclusion inclusion_predicate(Dimension n, const SpaceSpec& from, const SpaceSpec& to) {
  const double d = n.value();
  auto verdict = [](bool b) { return b ? Inclusion::Included : Inclusion::NotIncluded; };
  if (from.kind == SpaceKind::BergmanBesov && to.kind == SpaceKind::BergmanBesov) {
    const double p = from.p, a = from.alpha, q = to.p, b = to.alpha;
    if (q < p) return verdict(strictly_less((a + 1.0) / p, (b + 1.0) / q));
    return verdict(less_or_equal((a + d) / p, (b + d) / q));
  }
  if (from.kind == SpaceKind::Bloch && to.kind == SpaceKind::BergmanBesov) {
    return verdict(strictly_less(from.alpha, (to.alpha + 1.0) / to.p));
  }
  if (from.kind == SpaceKind::BergmanBesov && is_bloch(to.kind)) {
    return verdict(less_or_equal((from.alpha + d) / from.p, to.alpha));
  }
  throw UnsupportedPair("inclusion between " + to_string(from.kind) + " and " + to_string(to.kind) +
                        " spaces is not covered");
}

ReproductionOperator::ReproductionOperator(const BallQuadrature& q, double kernel_alpha, std::vector<Point> probes,
                                           double tol)
    : q_(&q), kernel_alpha_(kernel_alpha), probes_(std::move(probes)) {
  const Dimension n = q.dimension();
  const auto c = CoefficientSequence::kernel(n, kernel_alpha);
  for (const auto& x : probes_) {
    if (x.size() != static_cast<std::size_t>(n.value())) throw std::invalid_argument("probe has wrong dimension");
    const double r = norm(x);
    if (!(r < 1.0)) throw std::invalid_argument("reproduction probes must lie inside the ball");
    SeriesPlan plan = plan_series(c, r, {tol, 0.0});
    degree_ = std::max<std::size_t>(degree_, plan.degree);
    scaled_.push_back(std::move(plan.scaled));
  }
  normalizer_ = 1.0 / weight_constant(n, q.gamma()).value;
}

std::vector<std::vector<double>> ReproductionOperator::apply(const std::vector<std::vector<double>>& fields) const {
  const BallQuadrature& q = *q_;
  const std::size_t F = fields.size();
  const std::size_t P = probes_.size();
  const std::size_t K = degree_ + 1;
  const std::size_t D = q.directions().size();
  const std::size_t R = q.radii().size();
  for (const auto& f : fields) {
    if (f.size() != q.size()) throw std::invalid_argument("reproduction field has wrong node count");
  }
  // Fixed chunking keeps the reduction order independent of the thread count.
  constexpr std::size_t kChunks = 64;
  const std::size_t chunks = std::min(kChunks, D);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(F * P, 0.0));
  parallel_for(chunks, [&](std::size_t ch) {
    const std::size_t lo = D * ch / chunks;
    const std::size_t hi = D * (ch + 1) / chunks;
    std::vector<double> moments(F * K);
    std::vector<double> g(K);
    auto& acc = partial[ch];
    for (std::size_t j = lo; j < hi; ++j) {
      std::fill(moments.begin(), moments.end(), 0.0);
      for (std::size_t i = 0; i < R; ++i) {
        const double r = q.radii()[i];
        const double wr = q.radial_weights()[i];
        for (std::size_t f = 0; f < F; ++f) {
          const double v = fields[f][i * D + j] * wr;
          if (v == 0.0) continue;
          double pw = v;
          double* m = moments.data() + f * K;
          for (std::size_t k = 0; k < K && std::abs(pw) > 1e-280; ++k) {
            m[k] += pw;
            pw *= r;
          }
        }
      }
      const Point& eta = q.directions()[j];
      const double wd = q.direction_weights()[j];
      for (std::size_t p = 0; p < P; ++p) {
        const auto& sc = scaled_[p];
        const std::size_t Kp = sc.size();
        fill_zonal_polynomials(q.dimension(), angular_gap(probes_[p], eta), std::span(g).first(Kp));
        for (std::size_t k = 0; k < Kp; ++k) g[k] *= sc[k];
        for (std::size_t f = 0; f < F; ++f) {
          const double* m = moments.data() + f * K;
          double s = 0.0;
          for (std::size_t k = 0; k < Kp; ++k) s += g[k] * m[k];
          acc[f * P + p] += wd * s;
        }
      }
    }
  });
  std::vector<std::vector<double>> out(F, std::vector<double>(P, 0.0));
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t p = 0; p < P; ++p) out[f][p] += partial[ch][f * P + p];
    }
  }
  for (auto& row : out) {
    for (double& v : row) v *= normalizer_;
  }
  return out;
}

std::vector<double> sample_on(const BallQuadrature& q, const HarmonicExpansion& g, double tol) {
  std::vector<double> values(q.size());
  parallel_for(q.size(), [&](std::size_t idx) { values[idx] = evaluate(g, q.node(idx), tol); });
  return values;
}

namespace {

void check_reproduction_weight(const BallQuadrature& q, DiffPair pair) {
  const double gamma = pair.s + pair.t;
  if (!(gamma > -1.0)) throw AdmissibilityError("reproduction needs s + t > -1");
  if (std::abs(q.gamma() - gamma) > 1e-12 * std::max(1.0, std::abs(gamma))) {
    throw std::invalid_argument("reproduction quadrature weight must equal s + t");
  }
}

}  // namespace

std::vector<std::vector<double>> reproduce_batch(const std::vector<HarmonicExpansion>& fs, DiffPair pair,
                                                 const std::vector<Point>& probes, const BallQuadrature& q) {
  check_reproduction_weight(q, pair);
  std::vector<std::vector<double>> fields;
  fields.reserve(fs.size());
  for (const auto& f : fs) fields.push_back(sample_on(q, apply_D(f, pair)));
  return ReproductionOperator(q, pair.s, probes).apply(fields);
}

double reproduce(const HarmonicExpansion& f, double s, double t, std::span<const double> x, const BallQuadrature& q) {
  return reproduce_batch({f}, {s, t}, {Point(x.begin(), x.end())}, q)[0][0];
}

SplitResult split(const HarmonicExpansion& f, double alpha, DiffPair pair, double epsilon, const BallQuadrature& q,
                  const std::vector<Point>& probes) {
  SpaceSpec::bloch(alpha, pair).validate();
  check_reproduction_weight(q, pair);
  if (!(epsilon > 0.0)) throw std::invalid_argument("split: epsilon must be positive");
  const std::vector<double> df = sample_on(q, apply_D(f, pair));
  const double apt = alpha + pair.t;
  std::vector<double> inside(q.size()), outside(q.size());
  SplitResult out;
  out.epsilon = epsilon;
  out.probes = probes;
  const std::size_t D = q.directions().size();
  for (std::size_t idx = 0; idx < q.size(); ++idx) {
    const double r = q.radii()[idx / D];
    const bool in = std::pow((1.0 - r) * (1.0 + r), apt) * std::abs(df[idx]) >= epsilon;
    inside[idx] = in ? df[idx] : 0.0;
    outside[idx] = in ? 0.0 : df[idx];
    out.set_nodes += in ? 1 : 0;
  }
  const auto parts = ReproductionOperator(q, pair.s, probes).apply({inside, outside});
  const auto shifted = ReproductionOperator(q, pair.s + pair.t, probes).apply({outside});
  out.f1 = parts[0];
  out.f2 = parts[1];
  for (std::size_t p = 0; p < probes.size(); ++p) {
    out.f.push_back(evaluate(f, probes[p]));
    const double r2 = dot(probes[p], probes[p]);
    const double v = std::pow(1.0 - r2, apt) * std::abs(shifted[0][p]);
    out.df2_weighted.push_back(v);
    out.constant = std::max(out.constant, v / epsilon);
  }
  return out;
}

DistanceEstimate distance_estimate(const WeightedField& w, double relative_width) {
  DistanceEstimate est;
  est.norm = bloch_norm(w);
  if (est.norm == 0.0) return est;
  const double n = w.grid->dimension().value();
  auto verdict = [&](double eps) {
    ++est.evaluations;
    return level_set(w, eps, -n).integral.verdict;
  };
  double lo = 0.0;
  double hi = est.norm * (1.0 + 1e-12);
  if (verdict(hi) != Verdict::Finite) {
    est.inconclusive = true;
    est.lo = 0.0;
    est.hi = hi;
    est.estimate = 0.5 * hi;
    return est;
  }
  while (hi - lo > relative_width * est.norm) {
    const double mid = 0.5 * (lo + hi);
    const Verdict v = verdict(mid);
    if (v == Verdict::Finite) {
      hi = mid;
    } else if (v == Verdict::Divergent) {
      lo = mid;
    } else {
      est.inconclusive = true;
      break;
    }
  }
  est.lo = lo;
  est.hi = hi;
  est.estimate = (lo == 0.0 && !est.inconclusive) ? 0.0 : 0.5 * (lo + hi);
  return est;
}

DistanceEstimate distance_estimate(const HarmonicExpansion& f, double alpha, DiffPair pair,
                                   const ShellDecomposition& d, double relative_width) {
  return distance_estimate(weighted_field(f, alpha, pair, d), relative_width);
}

}  // namespace hball
