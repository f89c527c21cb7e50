#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hball/spaces.hpp"

namespace hball {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string name;
  Json parameters = Json::object();
  std::uint64_t seed = 1;
  std::optional<std::size_t> shells;  // overrides the shell depth of every grid
  std::optional<double> tol;          // overrides the series tolerance
  std::filesystem::path directory;    // base for relative paths in parameters

  static ExperimentConfig parse(const Json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

enum class Status { Pass, Fail, Inconclusive, Excluded };
std::string to_string(Status s);

struct ExperimentReport {
  std::string name;
  Json config;
  std::vector<Json> rows;  // each row carries a "status" field

  std::size_t count(Status s) const;
  /// 0 when nothing failed or was inconclusive, 1 on any failure, 2 when the
  /// only problems are inconclusive rows.
  int exit_code() const;
  Json to_json() const;
  std::string to_csv() const;
};

Json to_json(const ShellReport& r);
Json to_json(const LevelSetReport& r);
Json to_json(DiffPair p);

// Kernel integral growth.

enum class Regime { Bounded, Log, Power };
std::string to_string(Regime r);

/// w = p (n + alpha) - (n + d).
double growth_exponent(Dimension n, double p, double alpha, double d);
Regime expected_regime(double w);

struct GrowthOptions {
  int j_first = 3;  // radii 1 - r = 2^{-j}
  int j_last = 12;
  std::size_t fit_points = 8;
  double margin = 0.1;
  std::size_t shell_padding = 4;
  Tolerance tol{1e-14, 1e-13};
};

struct RegimeFit {
  int n = 2;
  double p = 1.0;
  double alpha = 0.0;
  double d = 0.0;
  double w = 0.0;
  double slope = 0.0;     // of log|I(r_j) - I(r_{j-1})| against log 1/(1-r^2)
  double residual = 0.0;  // root mean square of the fit
  Regime verdict = Regime::Bounded;
  bool flat = false;  // increments at roundoff level: I(r) is constant
  std::vector<double> radii;
  std::vector<double> integrals;

  bool consistent(double margin) const;
};

/// I(r) = integral |R_alpha(r e_1, y)|^p (1-|y|^2)^d dnu(y) on the schedule,
/// then a least-squares slope of the log increments over the last fit_points
/// radii. Slope above the margin is Power, within it Log, below it Bounded.
RegimeFit fit_kernel_growth(Dimension n, double p, double alpha, double d, const GrowthOptions& o = {});

// Test functions.

struct FamilyMember {
  std::string label;
  HarmonicExpansion f;
  bool polynomial = false;
  std::optional<double> sigma;  // kernel atoms: R_sigma(., e_1)
};

/// Family for b^p_{p alpha - n}: the manifest's polynomials and the kernel
/// atoms R_{alpha - n - offset}(., e_1) the membership predicate admits.
std::vector<FamilyMember> build_family(const Json& manifest, Dimension n, double p, double alpha);
HarmonicExpansion boundary_atom(Dimension n, double alpha);  // R_{alpha-n}(., e_1)
Json load_json(const std::filesystem::path& path);

// Runners. Each returns one row per check in declared order.

ExperimentReport run_kernel_growth(const ExperimentConfig& cfg);
ExperimentReport run_membership(const ExperimentConfig& cfg);
ExperimentReport run_inclusion_little_bloch(const ExperimentConfig& cfg);
ExperimentReport run_levelset_characterization(const ExperimentConfig& cfg);
ExperimentReport run_distance(const ExperimentConfig& cfg);
ExperimentReport run_verify_identities(const ExperimentConfig& cfg);

/// Dispatch by experiment id: kernel-growth, membership, inclusion, levelset,
/// distance, verify-identities.
ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& cfg);

}  // namespace hball
