#include "mirrorfdr/simdata.hpp"

#include <Eigen/Cholesky>

#include <set>

#include "mirrorfdr/rng.hpp"

namespace mirrorfdr::simdata {

std::string family_name(Family f) {
  switch (f) {
    case Family::linear: return "linear";
    case Family::random_intercept: return "random_intercept";
    case Family::logistic: return "logistic";
    case Family::poisson: return "poisson";
  }
  throw Error("unknown family tag");
}

Family family_from_name(const std::string& name) {
  if (name == "linear") return Family::linear;
  if (name == "random_intercept") return Family::random_intercept;
  if (name == "logistic") return Family::logistic;
  if (name == "poisson") return Family::poisson;
  throw Error("unknown family: " + name);
}

int CovarianceSpec::total_dim() const {
  int p = 0;
  for (int b : block_sizes) p += b;
  return p;
}

void CovarianceSpec::validate() const {
  if (block_sizes.empty()) throw Error("covariance spec has no blocks");
  for (int b : block_sizes)
    if (b <= 0) throw Error("covariance block sizes must be positive");
  if (rho < 0.0 || rho >= 1.0) throw Error("covariance rho must lie in [0, 1)");
}

MatrixXd build_block_toeplitz(const CovarianceSpec& spec) {
  spec.validate();
  const int p = spec.total_dim();
  MatrixXd sigma = MatrixXd::Zero(p, p);
  int offset = 0;
  for (int b : spec.block_sizes) {
    for (int u = 0; u < b; ++u) {
      sigma(offset + u, offset + u) = 1.0;
      for (int v = u + 1; v < b; ++v) {
        const int d = v - u;
        const double value = d >= b - 1 ? 0.0 : (b - 1 - d) * spec.rho / (b - 1);
        sigma(offset + u, offset + v) = value;
        sigma(offset + v, offset + u) = value;
      }
    }
    offset += b;
  }
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw Error("block Toeplitz covariance is not positive definite");
  return sigma;
}

MatrixXd sample_mvn(int n, const MatrixXd& sigma, std::uint64_t seed) {
  if (n < 0) throw Error("sample_mvn: negative sample count");
  const int p = static_cast<int>(sigma.rows());
  if (sigma.cols() != p) throw Error("sample_mvn: covariance must be square");
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw Error("sample_mvn: covariance factorization failed (not PD)");
  const MatrixXd lower = llt.matrixL();

  Rng rng(seed);
  MatrixXd z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) z(i, j) = rng.normal();
  return z * lower.transpose();
}

int GroundTruth::p1() const {
  int count = 0;
  for (int m : active_mask) count += m;
  return count;
}

int Dataset::n_subjects() const {
  if (subject_index.empty()) return 0;
  std::set<int> ids(subject_index.begin(), subject_index.end());
  return static_cast<int>(ids.size());
}

void ScenarioConfig::validate() const {
  if (n < 1) throw Error("scenario: n must be >= 1");
  if (p < 1) throw Error("scenario: p must be >= 1");
  if (p1 < 0 || p1 > p) throw Error("scenario: p1 must lie in [0, p]");
  if (M < 1) throw Error("scenario: M must be >= 1");
  if (M > 1 && family != Family::random_intercept)
    throw Error("scenario: M > 1 is only valid for random_intercept");
  if (rho < 0.0 || rho >= 1.0) throw Error("scenario: rho must lie in [0, 1)");
  if (sigma_y <= 0.0) throw Error("scenario: sigma_y must be positive");
  if (family == Family::random_intercept && sigma_b0r <= 0.0)
    throw Error("scenario: sigma_b0R must be positive");
}

CovarianceSpec ScenarioConfig::covariance() const {
  CovarianceSpec spec;
  spec.rho = rho;
  if (p1 > 0) spec.block_sizes.push_back(p1);
  if (p - p1 > 0) spec.block_sizes.push_back(p - p1);
  return spec;
}

GroundTruth gen_ground_truth(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.coefficient_pool.empty())
    throw Error("gen_ground_truth: empty coefficient pool");
  for (double c : config.coefficient_pool)
    if (c == 0.0) throw Error("gen_ground_truth: coefficient pool must exclude 0");

  GroundTruth truth;
  truth.beta = VectorXd::Zero(config.p);
  truth.active_mask.assign(static_cast<std::size_t>(config.p), 0);
  truth.beta0 = config.beta0;
  truth.sigma_y = config.sigma_y;
  truth.sigma_b0r = config.family == Family::random_intercept ? config.sigma_b0r : 0.0;

  Rng rng(seed);
  const auto pool_size = static_cast<std::uint64_t>(config.coefficient_pool.size());
  for (int j = 0; j < config.p1; ++j) {
    truth.beta(j) = config.coefficient_pool[rng.uniform_below(pool_size)];
    truth.active_mask[static_cast<std::size_t>(j)] = 1;
  }
  return truth;
}

namespace {

// Sanity bound on the Poisson linear predictor during simulation; beyond
// this the scenario is treated as misconfigured rather than saturated.
constexpr double kMaxPoissonEta = 30.0;

}  // namespace

Dataset simulate(const ScenarioConfig& config) {
  config.validate();
  const MatrixXd sigma = build_block_toeplitz(config.covariance());
  const GroundTruth truth = gen_ground_truth(config, derive_seed(config.seed, 1));

  Dataset data;
  data.truth = truth;

  const int rows = config.family == Family::random_intercept ? config.n * config.M : config.n;
  data.X = sample_mvn(rows, sigma, derive_seed(config.seed, 2));
  data.y.resize(rows);

  Rng rng(derive_seed(config.seed, 3));
  const VectorXd eta_fixed = (data.X * truth.beta).array() + truth.beta0;

  switch (config.family) {
    case Family::linear: {
      for (int i = 0; i < rows; ++i) data.y(i) = eta_fixed(i) + rng.normal(0.0, config.sigma_y);
      break;
    }
    case Family::random_intercept: {
      // Covariates are redrawn per measurement; subject structure enters
      // only through the shared baseline intercept.
      VectorXd b0r(config.n);
      for (int i = 0; i < config.n; ++i) b0r(i) = rng.normal(0.0, config.sigma_b0r);
      data.subject_index.resize(static_cast<std::size_t>(rows));
      data.measurement_index.resize(static_cast<std::size_t>(rows));
      int row = 0;
      for (int i = 0; i < config.n; ++i) {
        for (int l = 1; l <= config.M; ++l, ++row) {
          data.subject_index[static_cast<std::size_t>(row)] = i;
          data.measurement_index[static_cast<std::size_t>(row)] = l;
          data.y(row) = eta_fixed(row) + b0r(i) + rng.normal(0.0, config.sigma_y);
        }
      }
      break;
    }
    case Family::logistic: {
      for (int i = 0; i < rows; ++i) data.y(i) = rng.bernoulli(logistic(eta_fixed(i))) ? 1.0 : 0.0;
      break;
    }
    case Family::poisson: {
      for (int i = 0; i < rows; ++i) {
        if (eta_fixed(i) > kMaxPoissonEta)
          throw Error("poisson linear predictor overflow (eta = " +
                      std::to_string(eta_fixed(i)) + " > 30) at row " + std::to_string(i));
        data.y(i) = rng.poisson(std::exp(eta_fixed(i)));
      }
      break;
    }
  }
  return data;
}

}  // namespace mirrorfdr::simdata
