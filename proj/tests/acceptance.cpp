#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include "hball/experiments.hpp"

using namespace hball;

namespace {

const std::filesystem::path kSource = HBALL_SOURCE_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_seconds, const std::function<Outcome()>& run) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < budget_seconds;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d  %-32s %s  [%.1fs%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

ExperimentConfig config(const char* file) { return ExperimentConfig::load(kSource / "configs" / file); }

std::size_t rows_where(const ExperimentReport& r, const char* key, const char* value) {
  std::size_t c = 0;
  for (const auto& row : r.rows) c += row.value(key, std::string{}) == value ? 1 : 0;
  return c;
}

std::string tally(const ExperimentReport& r) {
  return std::to_string(r.count(Status::Pass)) + "/" + std::to_string(r.rows.size()) + " pass, " +
         std::to_string(r.count(Status::Inconclusive)) + " inconclusive";
}

}  // namespace

int main() {
  criterion(1, "kernel identities", 10.0, [] {
    ExperimentConfig c = config("verify-identities.json");
    c.parameters["reproduce"] = false;
    c.parameters["relative_tol"] = 1e-12;
    const ExperimentReport r = run_verify_identities(c);
    double worst = 0.0;
    for (const auto& row : r.rows) worst = std::max({worst, row["inverse_error"].get<double>(), row["shift_error"].get<double>()});
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu pairs, worst rel err %.2e (<= 1e-12)", r.rows.size(), worst);
    return Outcome{r.rows.size() == 100 && r.count(Status::Pass) == r.rows.size(), buf};
  });

  criterion(2, "reproducing formula", 120.0, [] {
    ExperimentConfig c = config("verify-identities.json");
    c.parameters["identities"] = false;
    c.parameters["reproduce_tol"] = 1e-6;
    const ExperimentReport r = run_verify_identities(c);
    double worst = 0.0;
    for (const auto& row : r.rows) worst = std::max(worst, row["max_error"].get<double>());
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu functions x 20 probes, worst %.2e (<= 1e-6)", r.rows.size(), worst);
    return Outcome{r.rows.size() == 30 && r.count(Status::Pass) == 30, buf};
  });

  criterion(3, "kernel integral trichotomy", 300.0, [] {
    const ExperimentReport r = run_kernel_growth(config("kernel-growth.json"));
    std::string slopes;
    for (const auto& row : r.rows) {
      if (row.value("verdict", std::string{}) != "Power") continue;
      char buf[48];
      std::snprintf(buf, sizeof buf, " w=%g:%.3f", row["w"].get<double>(), row["slope"].get<double>());
      slopes += buf;
    }
    const bool grid = r.rows.size() == 9 && rows_where(r, "expected", "Bounded") > 0 &&
                      rows_where(r, "expected", "Log") > 0 && rows_where(r, "expected", "Power") > 0;
    return Outcome{grid && r.count(Status::Pass) == 9, tally(r) + ";" + slopes};
  });

  criterion(4, "kernel atom membership", 300.0, [] {
    const ExperimentReport r = run_membership(config("membership.json"));
    return Outcome{r.rows.size() == 27 && r.count(Status::Pass) == 27, tally(r)};
  });

  criterion(5, "little Bloch inclusion", 600.0, [] {
    const ExperimentReport r = run_inclusion_little_bloch(config("inclusion.json"));
    const std::size_t non_members = rows_where(r, "function", "kernel(alpha-n)");
    return Outcome{non_members == 8 && r.count(Status::Pass) == r.rows.size(),
                   tally(r) + ", " + std::to_string(non_members) + " non-member rows"};
  });

  // One run of the level-set experiment feeds criteria 6 and 7.
  std::optional<ExperimentReport> levelset;
  auto level_rows = [&](const char* check, bool& ok, std::size_t& total) {
    if (!levelset) levelset = run_levelset_characterization(config("levelset.json"));
    ok = true;
    total = 0;
    for (const auto& row : levelset->rows) {
      if (row["check"] != check) continue;
      ++total;
      ok = ok && row["status"] == "pass";
    }
  };

  criterion(6, "level sets vs decay", 600.0, [&] {
    bool ok;
    std::size_t total;
    level_rows("equivalence", ok, total);
    std::size_t divergent = 0, atoms = 0;
    for (const auto& row : levelset->rows) {
      if (row["check"] != "equivalence" || row["function"] != "kernel(alpha-n)" || row["epsilon_fraction"] != 0.02) continue;
      ++atoms;
      divergent += row["verdict"] == "Divergent" ? 1 : 0;
    }
    return Outcome{ok && total > 0 && atoms == 8 && divergent == atoms,
                   std::to_string(total) + " rows agree; boundary atom Divergent at 0.02 sup in " +
                       std::to_string(divergent) + "/" + std::to_string(atoms)};
  });

  criterion(7, "level-set weight window", 600.0, [&] {
    bool ok;
    std::size_t total;
    level_rows("window", ok, total);
    return Outcome{ok && total == 24, std::to_string(total) + " rows Finite at beta - p alpha, Divergent at -n"};
  });

  criterion(8, "quadrature exactness", 60.0, [] {
    double beta_err = 0.0, sh_err = 0.0;
    for (int n : {2, 3}) {
      const Dimension dim(n);
      for (double g : {-0.5, 0.0, 1.0, 3.5}) {
        const std::size_t m = 16;
        const BallQuadrature q(dim, g, m, 8);
        for (int j = 0; j < 2 * static_cast<int>(m); ++j) {
          const double got = integrate_ball(q, [j](std::span<const double> x) { return std::pow(dot(x, x), j); });
          const double exact = 0.5 * n * std::beta(0.5 * n + j, g + 1.0);
          beta_err = std::max(beta_err, std::abs(got / exact - 1.0));
        }
      }
      std::vector<Point> dirs;
      std::vector<double> w;
      sphere_rule(dim, 40, dirs, w);
      Point x(static_cast<std::size_t>(n), 0.0), z(static_cast<std::size_t>(n), 0.0);
      x[0] = 0.7;
      x[1] = 0.2;
      z[0] = -0.3;
      z[1] = 0.6;
      for (unsigned k = 0; k <= 20; ++k) {
        for (unsigned l = 0; l <= 20; ++l) {
          double s = 0.0;
          for (std::size_t i = 0; i < dirs.size(); ++i) s += w[i] * zonal(dim, k, x, dirs[i]) * zonal(dim, l, dirs[i], z);
          sh_err = std::max(sh_err, std::abs(s - (k == l ? zonal(dim, k, x, z) : 0.0)));
        }
      }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "Beta moments %.1e (<= 1e-12), harmonics %.1e (<= 1e-10)", beta_err, sh_err);
    return Outcome{beta_err <= 1e-12 && sh_err <= 1e-10, buf};
  });

  criterion(9, "coefficient asymptotics", 10.0, [] {
    const Dimension n(2);
    bool upper = false, lower = false;
    double worst = 0.0;
    for (double a : {-5.0, -2.0, 0.0, 3.0}) {
      (coefficient_branch(n, a) == Branch::upper ? upper : lower) = true;
      const double r1 = gamma_coeff(n, a, 1000).value / std::pow(1000.0, a + 1.0);
      const double r4 = gamma_coeff(n, a, 4000).value / std::pow(4000.0, a + 1.0);
      worst = std::max(worst, std::abs(r4 / r1 - 1.0));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max drift %.2e (<= 5e-2), both branches %s", worst, upper && lower ? "yes" : "no");
    return Outcome{worst <= 0.05 && upper && lower, buf};
  });

  criterion(10, "distance estimator", 300.0, [] {
    const ExperimentReport r = run_distance(config("distance.json"));
    double lo = 1e300;
    for (const auto& row : r.rows) {
      if (row["function"] == "kernel(alpha-n)") lo = std::min(lo, row["estimate_p0"].get<double>());
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "; smallest boundary-atom estimate %.3g", lo);
    return Outcome{r.count(Status::Pass) == r.rows.size() && !r.rows.empty(), tally(r) + buf};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
