#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "hball/experiments.hpp"

using namespace hball;

TEST_CASE("growth exponent and expected regime") {
  CHECK(growth_exponent(Dimension(3), 2.0, 0.0, 1.0) == 2.0);
  CHECK(growth_exponent(Dimension(2), 1.0, 0.0, 0.0) == 0.0);
  CHECK(growth_exponent(Dimension(2), 1.0, -0.5, 1.0) == -1.5);
  CHECK(expected_regime(2.0) == Regime::Power);
  CHECK(expected_regime(0.0) == Regime::Log);
  CHECK(expected_regime(-0.5) == Regime::Bounded);
}

TEST_CASE("regime fit on a short schedule") {
  GrowthOptions o;
  o.j_last = 9;
  const RegimeFit power = fit_kernel_growth(Dimension(2), 2.0, 0.0, 1.0, o);
  CHECK(power.verdict == Regime::Power);
  CHECK(power.slope == doctest::Approx(1.0).epsilon(0.1));
  CHECK(power.radii.size() == 7);
  const RegimeFit bounded = fit_kernel_growth(Dimension(2), 1.0, -0.5, 1.0, o);
  CHECK(bounded.verdict == Regime::Bounded);
  CHECK(bounded.consistent(o.margin));
  CHECK_THROWS(fit_kernel_growth(Dimension(2), 1.0, 0.0, -1.0, o));
}

TEST_CASE("I(r) is constant for R_{-1} with p = 1") {
  // R_{-1}(x, .) is positive and harmonic, so the radial weight averages it to R_{-1}(x, 0) = 1.
  GrowthOptions o;
  o.j_last = 7;
  const RegimeFit f = fit_kernel_growth(Dimension(3), 1.0, -1.0, 0.5, o);
  CHECK(f.flat);
  CHECK(f.verdict == Regime::Bounded);
  CHECK(f.integrals.back() == doctest::Approx(weight_constant(Dimension(3), 0.5).value).epsilon(1e-10));
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = ExperimentConfig::parse(
      Json::parse(R"({"name": "x", "seed": 9, "shells": 12, "tol": 1e-9, "parameters": {"n": 2}})"));
  CHECK(c.seed == 9);
  CHECK(c.shells == 12u);
  CHECK(c.tol == 1e-9);
  CHECK(c.parameters["n"] == 2);
  CHECK_THROWS(ExperimentConfig::parse(Json::parse(R"({"parameters": [1, 2]})")));
  const ExperimentConfig loaded = ExperimentConfig::load(std::filesystem::path(HBALL_SOURCE_DIR) / "configs/inclusion.json");
  CHECK(loaded.parameters["family"] == "../data/family.json");
  CHECK(std::filesystem::exists(loaded.directory / loaded.parameters["family"].get<std::string>()));
}

TEST_CASE("report exit codes and CSV") {
  ExperimentReport r{"demo", Json::object(), {}};
  CHECK(r.exit_code() == 0);
  r.rows.push_back({{"a", 1}, {"pair", {{"s", 0.5}, {"t", 1}}}, {"status", "pass"}});
  r.rows.push_back({{"a", 2}, {"label", "x,y"}, {"list", {1, 2}}, {"status", "excluded"}});
  CHECK(r.exit_code() == 0);
  r.rows.push_back({{"a", 3}, {"status", "inconclusive"}});
  CHECK(r.exit_code() == 2);
  r.rows.push_back({{"a", 4}, {"status", "fail"}});
  CHECK(r.exit_code() == 1);
  CHECK(r.to_csv() ==
        "a,pair.s,pair.t,status,label,list\n"
        "1,0.5,1,pass,,\n"
        "2,,,excluded,\"x,y\",1;2\n"
        "3,,,inconclusive,,\n"
        "4,,,fail,,\n");
  const Json j = r.to_json();
  CHECK(j["summary"]["fail"] == 1);
  CHECK(j["summary"]["exit_code"] == 1);
}

TEST_CASE("family manifest") {
  const Json manifest = Json::parse(R"({"polynomials": [{"label": "c", "terms": [{"k": 0}]}],
                                        "kernel_offsets": [0, 2, 3]})");
  const auto fam = build_family(manifest, Dimension(3), 2.0, 1.0);
  REQUIRE(fam.size() == 3);  // offset 0 sits on the boundary and is dropped
  CHECK(fam[0].polynomial);
  CHECK(fam[1].sigma == -4.0);
  CHECK(fam[2].sigma == -5.0);
  CHECK(std::get<KernelAtom>(boundary_atom(Dimension(3), 1.0).atoms()[0].kind).s == -2.0);
}

TEST_CASE("membership runner agrees on a small grid and is deterministic") {
  ExperimentConfig c;
  c.name = "small";
  c.parameters = Json::parse(R"({"n": 2, "p": [1, 2], "s": [0], "beta": [-0.5, 2.5, 2.0], "shells": 16})");
  const ExperimentReport a = run_membership(c);
  CHECK(a.rows.size() == 6);
  CHECK(a.count(Status::Pass) == 5);
  CHECK(a.count(Status::Excluded) == 1);  // beta = 2, p = 2 is the boundary cell
  CHECK(a.exit_code() == 0);
  CHECK(run_membership(c).to_json().dump() == a.to_json().dump());
  CHECK_THROWS(run_experiment("nonsense", c));
}
