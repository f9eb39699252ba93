#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mirrorfdr/common.hpp"
#include "mirrorfdr/simdata.hpp"

namespace mirrorfdr::models {

using simdata::Dataset;
using simdata::Family;

enum class Constraint { free, positive, unit_interval };

std::string constraint_name(Constraint c);
Constraint constraint_from_name(const std::string& name);

struct Block {
  std::string name;
  int size = 0;
  Constraint constraint = Constraint::free;
};

/// Ordered mapping between named constrained parameters and one flat
/// unconstrained vector.
class ParameterLayout {
 public:
  ParameterLayout() = default;
  explicit ParameterLayout(std::vector<Block> blocks);

  int dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  bool has_block(const std::string& name) const;
  const Block& block(const std::string& name) const;
  int offset(const std::string& name) const;
  std::string coordinate_name(int k) const;

 private:
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

// Named constrained values matching a layout.
struct ParameterSet {
  std::map<std::string, VectorXd> values;

  const VectorXd& at(const std::string& name) const;
  bool has(const std::string& name) const { return values.count(name) > 0; }
};

enum class PriorKind { horseshoe, product };

struct PriorConfig {
  PriorKind kind = PriorKind::product;
  double a = 1.0;           // Beta shape (product prior)
  double b = 1.0;           // Beta shape (product prior)
  double sigma_tau = 1.0;   // half-Cauchy scale of the global shrinkage

  void validate() const;
};

struct ModelSpec {
  Family family = Family::linear;
  PriorConfig prior;
  double intercept_prior_scale = 5.0;
  double sigma_y_prior_scale = 1.0;
  double random_intercept_prior_scale = 3.0;

  bool has_sigma_y() const {
    return family == Family::linear || family == Family::random_intercept;
  }
  bool has_random_intercepts() const { return family == Family::random_intercept; }
};

ParameterLayout layout_for(const ModelSpec& model, int n_subjects, int p);

// Unconstrained -> constrained, returning the log-Jacobian of the map.
std::pair<ParameterSet, double> to_constrained(const VectorXd& u, const ParameterLayout& layout);
VectorXd to_unconstrained(const ParameterSet& params, const ParameterLayout& layout);

double log_joint(const ModelSpec& model, const ParameterSet& params, const Dataset& data);

// Columns rescaled to mean 0 and unit variance; constant columns are left
// centered only.
Dataset standardize_columns(const Dataset& data);

// Scalar log-densities shared by the joint and its gradients. Scale
// arguments are standard deviations throughout.
double normal_logpdf(double x, double mean, double sd);
double half_normal_logpdf(double x, double scale);
double half_cauchy_logpdf(double x, double scale);
double beta_logpdf(double x, double a, double b);

}  // namespace mirrorfdr::models
