#pragma once

#include <cstdint>
#include <vector>

#include "mirrorfdr/common.hpp"
#include "mirrorfdr/mirror.hpp"
#include "mirrorfdr/simdata.hpp"

namespace mirrorfdr::baselines {

using mirror::SelectionResult;
using simdata::Dataset;
using simdata::Family;

struct LassoFit {
  VectorXd coefficients;
  double intercept = 0.0;
  double lambda = 0.0;
  int iterations_used = 0;
  bool converged = false;

  std::vector<int> support() const;
};

/// Cyclic coordinate descent with soft-thresholding for
///   (1/2n) ||y - b0 - X b||^2 + lambda ||b||_1,
/// intercept unpenalized (handled by centering).
LassoFit lasso_fit(const MatrixXd& X, const VectorXd& y, double lambda, double tol = 1e-7,
                   int max_sweeps = 10000);

// Penalized maximum likelihood for GLM families via iteratively reweighted
// coordinate descent. family must be logistic or poisson.
LassoFit glm_lasso_fit(const MatrixXd& X, const VectorXd& y, Family family, double lambda,
                       double tol = 1e-7, int max_sweeps = 10000);

/// K-fold cross-validation over a log-spaced grid from lambda_max down
/// four decades; returns the lambda with the smallest mean held-out
/// squared error (largest lambda on ties).
double lasso_cv(const MatrixXd& X, const VectorXd& y, int grid_size, int folds,
                std::uint64_t seed, Family family = Family::linear);

/// Data-splitting mirror selection: LASSO support on one half, restricted
/// OLS on the other, mirror transform on the coefficient pair, threshold
/// as the single-draw case of the mirror threshold rule.
SelectionResult ds_select(const Dataset& data, double alpha, std::uint64_t seed);

struct KnockoffDesign {
  MatrixXd x_tilde;
  VectorXd s;  // per-variable decoupling weights on the covariance scale
};

/// Model-X Gaussian knockoffs with known covariance, equicorrelated
/// construction: s = min(2 lambda_min(corr(Sigma)), 1) on the correlation
/// scale, rows drawn from the conditional Gaussian.
KnockoffDesign gaussian_knockoffs(const MatrixXd& X, const MatrixXd& sigma, std::uint64_t seed);

/// Knockoff+ selection with W_j = |beta_j| - |beta_j^knockoff| from one
/// CV-lambda LASSO fit on the augmented design.
SelectionResult knockoff_select(const Dataset& data, const MatrixXd& sigma, double alpha,
                                std::uint64_t seed, Family family = Family::linear);

// Benjamini-Hochberg step-up rule; returns 0-based indices of rejections.
std::vector<int> bh_select(const VectorXd& pvalues, double alpha);

// Two-sided OLS t-test p-values (intercept excluded); requires n > p + 1.
VectorXd ols_pvalues(const MatrixXd& X, const VectorXd& y);

// Regularized incomplete beta I_x(a, b) and the Student-t upper tail,
// used for the OLS p-values.
double incomplete_beta(double a, double b, double x);
double student_t_sf(double t, double df);

}  // namespace mirrorfdr::baselines
