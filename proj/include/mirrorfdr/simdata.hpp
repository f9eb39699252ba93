#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mirrorfdr/common.hpp"

namespace mirrorfdr::simdata {

enum class Family { linear, random_intercept, logistic, poisson };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Block-diagonal Toeplitz covariance: within a block of size p', entry
/// (u, v) is (p' - 1 - |u - v|) * rho / (p' - 1) off the diagonal and 1 on
/// it; entries across blocks are zero.
struct CovarianceSpec {
  std::vector<int> block_sizes;
  double rho = 0.0;

  int total_dim() const;
  void validate() const;
};

MatrixXd build_block_toeplitz(const CovarianceSpec& spec);

// Rows are independent N(0, Sigma) draws; deterministic given the seed.
MatrixXd sample_mvn(int n, const MatrixXd& sigma, std::uint64_t seed);

struct GroundTruth {
  VectorXd beta;
  std::vector<int> active_mask;  // 1 where beta[j] != 0
  double beta0 = 0.0;
  double sigma_y = 1.0;
  double sigma_b0r = 0.0;  // random-intercept scale, mixed scenario only

  int p1() const;
};

struct Dataset {
  VectorXd y;
  MatrixXd X;
  std::vector<int> subject_index;      // empty unless repeated measurements
  std::vector<int> measurement_index;  // 1..M, aligned with subject_index
  std::optional<GroundTruth> truth;

  int n_rows() const { return static_cast<int>(y.size()); }
  int n_cols() const { return static_cast<int>(X.cols()); }
  bool has_subjects() const { return !subject_index.empty(); }
  int n_subjects() const;
};

struct ScenarioConfig {
  Family family = Family::linear;
  int n = 100;   // subjects
  int p = 10;    // covariates
  int p1 = 0;    // active covariates, placed in the leading block
  double rho = 0.0;
  std::vector<double> coefficient_pool = {-2.0, -1.0, 1.0, 2.0};
  double sigma_y = 1.0;
  double sigma_b0r = 2.0;
  int M = 1;  // repeated measurements per subject
  double beta0 = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  // Leading block holds the active coefficients: p' = {p1, p - p1}.
  CovarianceSpec covariance() const;
};

GroundTruth gen_ground_truth(const ScenarioConfig& config, std::uint64_t seed);

Dataset simulate(const ScenarioConfig& config);

}  // namespace mirrorfdr::simdata
