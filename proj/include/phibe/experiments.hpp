#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phibe/metrics.hpp"

namespace phibe {

struct ExperimentConfig {
  std::string preset;
  std::map<std::string, std::string> overrides;  // key=value, schema per preset
  std::string out_dir;                           // empty: compute only, write nothing
};

struct PresetCheck {
  std::string name;
  bool hard = true;  // hard checks gate the exit code; advisory ones only report
  bool passed = false;
  std::string detail;
};

struct PresetResult {
  std::string preset;
  std::vector<ErrorReport> reports;       // rows of errors.csv
  std::vector<PresetCheck> checks;        // summary.txt content
  std::vector<std::string> cell_errors;   // solver failures, preset continued
  bool ok() const;                        // every hard check passed
};

std::vector<std::string> preset_names();

// Runs a registered preset; writes errors.csv, manifest.json and summary.txt
// into config.out_dir when it is nonempty.
PresetResult run_preset(const ExperimentConfig& config);

// O^T diag(eigenvalues) O with O drawn from the QR factorization of a seeded
// Gaussian matrix (deterministic in seed).
Eigen::MatrixXd generate_orthogonal_conjugation(int d, const Eigen::VectorXd& eigenvalues,
                                                std::uint64_t seed);

// The 10-dimensional LQ instance shared by the fig9 preset and its tests.
struct Lq10Problem {
  Eigen::MatrixXd A;      // drift, eigenvalues -0.1 (1..10) under conjugation
  Eigen::MatrixXd Sigma;  // diffusion covariance, 0.3 I
  Eigen::MatrixXd Q;      // reward r(s) = s^T Q s, eigenvalues 1..10
  double beta = 1.0;
};
Lq10Problem make_lq10_problem();

}  // namespace phibe
