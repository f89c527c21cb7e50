#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hball/experiments.hpp"

namespace {

constexpr int kUsageError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted harmonic function experiments on the unit ball"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::size_t> shells;
  std::optional<double> tol;

  const char* ids[] = {"kernel-growth", "membership", "inclusion", "levelset", "distance", "verify-identities"};
  const char* about[] = {
      "regime fits of weighted kernel integrals as |x| -> 1",
      "kernel atom membership: predicate vs shell verdicts",
      "Bergman-Besov family against the little Bloch decay test",
      "level-set finiteness against decay, and the weight window",
      "level-set distance estimates for two exponents",
      "coefficient identities and the reproducing formula"};
  for (std::size_t i = 0; i < std::size(ids); ++i) {
    CLI::App* sub = app.add_subcommand(ids[i], about[i]);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "output path")->required();
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--shells", shells, "shell depth override");
    sub->add_option("--tol", tol, "series tolerance override")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const std::string id = app.get_subcommands().front()->get_name();
  hball::ExperimentReport report;
  try {
    hball::ExperimentConfig cfg = hball::ExperimentConfig::load(config_path);
    if (shells) cfg.shells = shells;
    if (tol) cfg.tol = tol;
    if (cfg.name.empty()) cfg.name = id;
    report = hball::run_experiment(id, cfg);
  } catch (const std::exception& e) {
    std::cerr << "hball " << id << ": " << e.what() << "\n";
    return kUsageError;
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "hball: cannot write " << out_path << "\n";
    return kUsageError;
  }
  if (format == "csv") {
    out << report.to_csv();
  } else {
    out << report.to_json().dump(2) << "\n";
  }

  std::cout << id << ": " << report.rows.size() << " rows, " << report.count(hball::Status::Pass) << " pass, "
            << report.count(hball::Status::Fail) << " fail, " << report.count(hball::Status::Inconclusive)
            << " inconclusive, " << report.count(hball::Status::Excluded) << " excluded\n";
  return report.exit_code();
}
