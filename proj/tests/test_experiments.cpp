#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "phibe/experiments.hpp"

using namespace phibe;

TEST_CASE("generate_orthogonal_conjugation: spectrum, determinism, validation") {
  Eigen::VectorXd eigs(10);
  for (int i = 0; i < 10; ++i) eigs(i) = i + 1.0;

  const Eigen::MatrixXd M = generate_orthogonal_conjugation(10, eigs, 42);
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  for (int i = 0; i < 10; ++i) CHECK(es.eigenvalues()(i) == doctest::Approx(i + 1.0).epsilon(1e-10));
  CHECK(M.cwiseAbs().maxCoeff() < 10.0 + 1e-9);

  const Eigen::MatrixXd again = generate_orthogonal_conjugation(10, eigs, 42);
  CHECK((M - again).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd other = generate_orthogonal_conjugation(10, eigs, 43);
  CHECK((M - other).cwiseAbs().maxCoeff() > 1e-3);

  const Eigen::MatrixXd scaled =
      generate_orthogonal_conjugation(4, Eigen::VectorXd::Constant(4, 2.5), 7);
  CHECK((scaled - 2.5 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(generate_orthogonal_conjugation(3, eigs, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_orthogonal_conjugation(0, Eigen::VectorXd(), 1),
                  std::invalid_argument);
}

TEST_CASE("make_lq10_problem: fixed instance") {
  const Lq10Problem prob = make_lq10_problem();
  CHECK(prob.beta == 1.0);
  CHECK((prob.Sigma - 0.3 * Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(prob.Q), ea(prob.A);
  for (int i = 0; i < 10; ++i) {
    CHECK(eq.eigenvalues()(i) == doctest::Approx(i + 1.0).epsilon(1e-10));
    CHECK(ea.eigenvalues()(i) == doctest::Approx(-0.1 * (10 - i)).epsilon(1e-10));
  }

  const Lq10Problem again = make_lq10_problem();
  CHECK((prob.A - again.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((prob.Q - again.Q).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_preset: rejects unknown presets and unknown overrides") {
  CHECK(preset_names().size() == 9);

  ExperimentConfig bad;
  bad.preset = "fig99";
  CHECK_THROWS_WITH_AS(run_preset(bad), doctest::Contains("unknown preset"),
                       std::invalid_argument);

  ExperimentConfig typo;
  typo.preset = "fig6";
  typo.overrides["bogus"] = "1";
  CHECK_THROWS_WITH_AS(run_preset(typo), doctest::Contains("does not accept"),
                       std::invalid_argument);
}

TEST_CASE("run_preset fig6: analytic checks pass, runs are reproducible") {
  ExperimentConfig cfg;
  cfg.preset = "fig6";
  const PresetResult res = run_preset(cfg);
  CHECK(res.ok());
  CHECK(res.cell_errors.empty());
  CHECK(!res.reports.empty());

  auto find = [&](const std::string& name) -> const PresetCheck* {
    for (const PresetCheck& c : res.checks)
      if (c.name == name) return &c;
    return nullptr;
  };
  for (const char* name : {"fig6_case1_baseline_phibe_beats_be", "fig6_phibe_ode_residual",
                           "fig6_case1_a1", "fig6_case1_a1R", "fig6_case1_a1P"}) {
    const PresetCheck* c = find(name);
    REQUIRE(c != nullptr);
    CHECK(c->passed);
    CHECK(c->hard);
  }

  const PresetResult rerun = run_preset(cfg);
  REQUIRE(rerun.reports.size() == res.reports.size());
  for (std::size_t i = 0; i < res.reports.size(); ++i) {
    CHECK(rerun.reports[i].l2 == res.reports[i].l2);
    CHECK(rerun.reports[i].linf == res.reports[i].linf);
  }
}

TEST_CASE("run_preset fig6: artifact files are written and well-formed") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "phibe_test_fig6_out";
  fs::remove_all(dir);

  ExperimentConfig cfg;
  cfg.preset = "fig6";
  cfg.overrides["dt_sweep"] = "0.2,0.1,0.05";
  cfg.out_dir = dir.string();
  const PresetResult res = run_preset(cfg);
  CHECK(res.ok());

  std::ifstream csv(dir / "errors.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "method,order,dt,n,seed,l2,linf");
  int rows = 0;
  for (std::string line; std::getline(csv, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(res.reports.size()));

  std::ifstream mf(dir / "manifest.json");
  REQUIRE(mf.good());
  const nlohmann::json manifest = nlohmann::json::parse(mf);
  CHECK(manifest.at("preset") == "fig6");
  CHECK(manifest.at("hard_ok") == true);
  CHECK(manifest.at("overrides").at("dt_sweep") == "0.2,0.1,0.05");
  CHECK(!manifest.at("checks").empty());

  std::ifstream sf(dir / "summary.txt");
  REQUIRE(sf.good());
  std::string summary((std::istreambuf_iterator<char>(sf)), std::istreambuf_iterator<char>());
  CHECK(summary.find("RESULT: OK") != std::string::npos);
  CHECK(summary.find("[PASS]") != std::string::npos);
  CHECK(summary.find("[FAIL]") == std::string::npos);

  fs::remove_all(dir);
}

TEST_CASE("run_preset table1: small overrides produce the full report grid") {
  ExperimentConfig cfg;
  cfg.preset = "table1";
  cfg.overrides["n"] = "2000";
  cfg.overrides["reps"] = "3";
  const PresetResult res = run_preset(cfg);
  CHECK(res.cell_errors.empty());
  CHECK(res.reports.size() == 24);  // 4 scenarios x 3 reps x 2 methods
  int phibe = 0, lstd = 0;
  for (const ErrorReport& r : res.reports) {
    CHECK(r.n == 2000);
    CHECK(r.l2 >= 0.0);
    CHECK(r.l2 < 10.0);
    if (r.method == "phibe-pairs") ++phibe;
    if (r.method == "lstd") ++lstd;
  }
  CHECK(phibe == 12);
  CHECK(lstd == 12);
  // at this data volume the winner counters must still have been computed
  bool found = false;
  for (const PresetCheck& c : res.checks)
    if (c.name == "table1_wins_3_of_4") found = true;
  CHECK(found);
}
