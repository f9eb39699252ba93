#pragma once

#include <cstdint>

#include "mirrorfdr/advi.hpp"
#include "mirrorfdr/models.hpp"

namespace mirrorfdr::models {

/// Log joint (plus transform Jacobian) of a regression model over the flat
/// unconstrained vector, with hand-derived gradients. All densities are
/// closed-form, so no tape is needed; correctness is pinned by the
/// finite-difference agreement tests.
class RegressionTarget : public advi::DifferentiableTarget {
 public:
  RegressionTarget(ModelSpec model, Dataset data);

  const ParameterLayout& layout() const override { return layout_; }
  double value_and_gradient(const VectorXd& u, VectorXd& grad) const override;

  const ModelSpec& model() const { return model_; }
  const Dataset& data() const { return data_; }

 private:
  ModelSpec model_;
  Dataset data_;
  ParameterLayout layout_;
  int p_ = 0;
};

/// Posterior draws of the regression coefficients on the constrained
/// scale: eta * lambda under the product prior, beta directly under the
/// horseshoe. One row per draw.
MatrixXd coefficient_draws(const advi::VariationalPosterior& posterior, const ModelSpec& model,
                           const ParameterLayout& layout, int count, std::uint64_t seed);

// Standardizes covariates, builds the target, and runs the optimizer.
advi::FitTrace fit_model(const ModelSpec& model, const Dataset& data,
                         const advi::AdviConfig& config);

}  // namespace mirrorfdr::models
