#pragma once

#include <cstdint>
#include <vector>

#include "mirrorfdr/common.hpp"
#include "mirrorfdr/models.hpp"

namespace mirrorfdr::advi {

using models::ParameterLayout;

/// Differentiable unconstrained target: value(u) must equal
/// log_joint(T(u)) + log|J(u)| for the model the target wraps.
class DifferentiableTarget {
 public:
  virtual ~DifferentiableTarget() = default;
  virtual const ParameterLayout& layout() const = 0;
  virtual double value_and_gradient(const VectorXd& u, VectorXd& grad) const = 0;

  int dim() const { return layout().dim(); }
  double value(const VectorXd& u) const {
    VectorXd grad(dim());
    return value_and_gradient(u, grad);
  }
};

/// Factorized Gaussian over the unconstrained space, one (location,
/// log-scale) pair per coordinate.
struct VariationalPosterior {
  VectorXd locations;
  VectorXd log_scales;
  ParameterLayout layout;

  int dim() const { return static_cast<int>(locations.size()); }
  VectorXd scales() const { return log_scales.array().exp(); }
};

struct AdviConfig {
  int n_mc = 4;
  int iterations = 4000;
  double step_size = 0.1;        // eta0
  double decay_rate = 0.1;       // weight on the fresh squared gradient
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  double init_location_scale = 0.0;  // 0 -> start exactly at the origin
  double init_log_scale = -2.0;

  void validate() const;
};

struct FitTrace {
  std::vector<int> iterations;
  std::vector<double> smoothed_elbo;
  VariationalPosterior posterior;
  double wall_seconds = 0.0;
};

// Exact (no Monte Carlo noise) entropy of the factorized Gaussian.
double entropy(const VariationalPosterior& q);

double elbo_estimate(const VariationalPosterior& q, const DifferentiableTarget& target, int n_mc,
                     std::uint64_t seed);

// Reparameterization-trick gradient over (locations, log_scales); the
// entropy term is differentiated analytically. Returns the matching ELBO
// estimate for the same draws.
double elbo_gradient(const VariationalPosterior& q, const DifferentiableTarget& target, int n_mc,
                     std::uint64_t seed, VectorXd& grad_locations, VectorXd& grad_log_scales);

// Ascends the ELBO with decayed adaptive per-coordinate steps.
FitTrace fit(const DifferentiableTarget& target, const AdviConfig& config);

// count x dim unconstrained draws from q.
MatrixXd sample_posterior(const VariationalPosterior& q, int count, std::uint64_t seed);

}  // namespace mirrorfdr::advi
