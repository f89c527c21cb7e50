#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hball/error.hpp"
#include "hball/spaces.hpp"

using namespace hball;

namespace {

double V(int n, double a) { return 0.5 * n * std::beta(0.5 * n, a + 1.0); }

}  // namespace

TEST_CASE("default pairs") {
  const DiffPair bb = default_pair(SpaceKind::BergmanBesov, 2.0, 0.0);
  CHECK(bb.t == 1.0);
  CHECK(bb.s == 1.0);
  const DiffPair low = default_pair(SpaceKind::BergmanBesov, 1.0, -3.5);
  CHECK(low.t == 4.0);
  CHECK(low.s == 0.5);
  const DiffPair bl = default_pair(SpaceKind::Bloch, 0.0, -2.5);
  CHECK(bl.t == 4.0);
  CHECK(SpaceSpec::bloch(-2.5).admissible());
  CHECK(SpaceSpec::bergman_besov(1.0, -3.5).admissible());
}

TEST_CASE("admissibility") {
  CHECK_THROWS_AS(SpaceSpec::bergman_besov(2.0, -3.0, {0.0, 1.0}).validate(), AdmissibilityError);
  CHECK_NOTHROW(SpaceSpec::bergman_besov(2.0, -3.0, {0.0, 1.5}).validate());
  CHECK_THROWS_AS(SpaceSpec::bloch(-1.0, {0.0, 1.0}).validate(), AdmissibilityError);
  CHECK_NOTHROW(SpaceSpec::little_bloch(-1.0, {0.0, 1.5}).validate());
}

TEST_CASE("kernel atom membership predicate") {
  const Dimension n(2);
  CHECK(membership_kernel_atom(n, 1.0, 0.0, 1.0) == Membership::Member);
  CHECK(membership_kernel_atom(n, 2.0, 0.0, 2.0) == Membership::NonMember);  // boundary beta + n = p (n + s)
  CHECK(membership_kernel_atom(n, 2.0, 0.0, 2.01) == Membership::Member);
  CHECK(membership_kernel_atom(Dimension(3), 1.0, -4.0, -0.5) == Membership::Member);
}

TEST_CASE("inclusion predicates") {
  const Dimension n(3);
  CHECK(inclusion_predicate(n, SpaceSpec::bergman_besov(2.0, 0.0), SpaceSpec::bergman_besov(1.0, 2.0)) ==
        Inclusion::Included);
  CHECK(inclusion_predicate(n, SpaceSpec::bergman_besov(1.0, 1.0), SpaceSpec::bergman_besov(2.0, 0.0)) ==
        Inclusion::NotIncluded);
  CHECK(inclusion_predicate(n, SpaceSpec::bergman_besov(1.0, 0.0), SpaceSpec::bergman_besov(2.0, 3.0)) ==
        Inclusion::Included);
  CHECK(inclusion_predicate(n, SpaceSpec::bergman_besov(2.0, 1.0), SpaceSpec::little_bloch(2.0)) ==
        Inclusion::Included);
  CHECK(inclusion_predicate(n, SpaceSpec::bergman_besov(2.0, 1.0), SpaceSpec::bloch(1.5)) == Inclusion::NotIncluded);
  CHECK(inclusion_predicate(n, SpaceSpec::bloch(0.5), SpaceSpec::bergman_besov(1.0, 0.0)) == Inclusion::Included);
  CHECK(inclusion_predicate(n, SpaceSpec::bloch(1.0), SpaceSpec::bergman_besov(1.0, 0.0)) == Inclusion::NotIncluded);
  CHECK_THROWS_AS(inclusion_predicate(n, SpaceSpec::bloch(1.0), SpaceSpec::bloch(2.0)), UnsupportedPair);
  CHECK_THROWS_AS(inclusion_predicate(n, SpaceSpec::little_bloch(1.0), SpaceSpec::bergman_besov(1.0, 0.0)),
                  UnsupportedPair);
}

TEST_CASE("Bergman-Besov norms of constants and zonal harmonics") {
  for (int n : {2, 3}) {
    const Dimension dim(n);
    Point z(static_cast<std::size_t>(n), 0.0);
    z[0] = 1.0;
    const HarmonicExpansion one(dim, {Atom{ZonalTerm{0, z}, 1.0}});
    for (double p : {1.0, 2.0, 3.0}) {
      const SpaceSpec spec = SpaceSpec::bergman_besov(p, 0.5);
      const BallQuadrature q(dim, 0.5 + p * spec.pair.t, 10, 10);
      CHECK(besov_norm(one, spec, q) == doctest::Approx(std::pow(V(n, 0.5 + p * spec.pair.t) / V(n, 0.5), 1.0 / p)).epsilon(1e-12));
    }
    // p = 2: integral over the sphere of Z_k(., z)^2 is h_k
    const unsigned k = 4;
    const HarmonicExpansion zk(dim, {Atom{ZonalTerm{k, z}, 1.0}});
    const SpaceSpec spec = SpaceSpec::bergman_besov(2.0, 0.0, {0.0, 1.0});
    const double g = gamma_ratio(dim, 0.0, 1.0, k);
    const double oracle = std::sqrt(g * g * static_cast<double>(dim_spherical_harmonics(dim, k)) * 0.5 * n *
                                    std::beta(0.5 * n + k, 3.0) / V(n, 0.0));
    CHECK(besov_norm(zk, spec, BallQuadrature(dim, 2.0, 8, 12)) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK_THROWS(besov_norm(zk, spec, BallQuadrature(dim, 1.0, 8, 12)));
  }
}

TEST_CASE("shell norm verdicts for kernel atoms") {
  const Dimension n(2);
  ShellOptions o;
  o.shells = 20;
  const ShellDecomposition d(n, o);
  const HarmonicExpansion atom(n, {Atom{KernelAtom{0.0, {1.0, 0.0}}, 1.0}});
  // beta + n > p (n + s): 1 + 2 > 2 for member, -0.5 + 2 < 2 for non-member
  CHECK(besov_shells(atom, SpaceSpec::bergman_besov(1.0, 1.0, {0.0, 1.0}), d).verdict == Verdict::Finite);
  CHECK(besov_shells(atom, SpaceSpec::bergman_besov(1.0, -0.5, {0.0, 1.0}), d).verdict == Verdict::Divergent);
}

TEST_CASE("decay verdicts and level sets") {
  const Dimension n(2);
  ShellOptions o;
  o.shells = 40;
  const ShellDecomposition d(n, o);
  const HarmonicExpansion one(n, {Atom{ZonalTerm{0, {1.0, 0.0}}, 1.0}});
  const DiffPair pair{-2.0, 3.0};
  const WeightedField w = weighted_field(one, 0.0, pair, d);
  CHECK(bloch_norm(w) == doctest::Approx(1.0));
  CHECK(little_bloch_test(w) == DecayVerdict::Decaying);

  // {(1-|x|^2)^3 >= eps} is the ball of radius sqrt(1 - eps^{1/3})
  for (double eps : {0.5, 0.1}) {
    const LevelSetReport ls = level_set(w, eps, -2.0);
    CHECK(ls.integral.verdict == Verdict::Finite);
    const double R2 = 1.0 - std::cbrt(eps);
    const double oracle = 1.0 / (1.0 - R2) - 1.0;  // integral of (1-r^2)^{-2} 2 r dr over [0, R]
    CHECK(ls.integral.total == doctest::Approx(oracle).epsilon(0.1));
  }

  const HarmonicExpansion atom(n, {Atom{KernelAtom{-2.0, {1.0, 0.0}}, 1.0}});
  const WeightedField wa = weighted_field(atom, 0.0, pair, d);
  CHECK(little_bloch_test(wa) == DecayVerdict::NonDecaying);
  CHECK(level_set(wa, 0.1 * bloch_norm(wa), -2.0).integral.verdict == Verdict::Divergent);
  CHECK(level_set(wa, 0.1 * bloch_norm(wa), -1.0).integral.verdict == Verdict::Finite);
  CHECK_THROWS(level_set(wa, 0.0, -2.0));
}

TEST_CASE("reproducing formula on polynomials and interior atoms") {
  const Dimension n(2);
  const BallQuadrature q(n, 0.0, 16, 120);
  const HarmonicExpansion f(n, {Atom{ZonalTerm{3, {0.6, 0.8}}, 1.0}, Atom{ZonalTerm{0, {1.0, 0.0}}, 0.5},
                                Atom{KernelAtom{0.5, {0.2, -0.3}}, 1.0}});
  for (const Point& x : {Point{0.0, 0.0}, Point{0.5, 0.3}, Point{-0.2, 0.85}}) {
    CHECK(reproduce(f, -2.0, 2.0, x, q) == doctest::Approx(evaluate(f, x)).epsilon(1e-10).scale(1.0));
  }
  CHECK_THROWS(reproduce(f, -2.0, 2.5, Point{0.1, 0.1}, q));
}

TEST_CASE("splitting reassembles the function") {
  const Dimension n(2);
  const BallQuadrature q(n, 0.0, 16, 120);
  const HarmonicExpansion f(n, {Atom{ZonalTerm{2, {1.0, 0.0}}, 1.0}, Atom{KernelAtom{0.0, {0.0, 0.5}}, 0.3}});
  const std::vector<Point> probes{{0.1, 0.2}, {0.6, -0.3}, {0.0, 0.0}};
  const SplitResult r = split(f, 0.0, {-2.0, 2.0}, 0.05, q, probes);
  for (std::size_t i = 0; i < probes.size(); ++i) CHECK(r.f1[i] + r.f2[i] == doctest::Approx(r.f[i]).epsilon(1e-9));
  CHECK(r.set_nodes > 0);
  CHECK(std::isfinite(r.constant));
}

TEST_CASE("distance estimates") {
  const Dimension n(2);
  ShellOptions o;
  o.shells = 30;
  const ShellDecomposition d(n, o);
  const DiffPair pair{-2.0, 3.0};
  const HarmonicExpansion poly(n, {Atom{ZonalTerm{3, {0.0, 1.0}}, 1.0}});
  const DistanceEstimate dp = distance_estimate(poly, 0.0, pair, d);
  CHECK(dp.estimate == 0.0);
  CHECK(dp.hi - dp.lo <= 1e-3 * dp.norm);
  const DistanceEstimate dz = distance_estimate(HarmonicExpansion(n, {}), 0.0, pair, d);
  CHECK(dz.estimate == 0.0);
  CHECK(dz.norm == 0.0);
  const DistanceEstimate da = distance_estimate(HarmonicExpansion(n, {Atom{KernelAtom{-2.0, {1.0, 0.0}}, 1.0}}), 0.0, pair, d);
  CHECK(da.lo > 0.0);
  CHECK(da.estimate <= da.norm);
}
