#include "mirrorfdr/models.hpp"

#include <numbers>

namespace mirrorfdr::models {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)
constexpr double kLogTwo = 0.6931471805599453;
constexpr double kLogPi = 1.1447298858494002;
}  // namespace

std::string constraint_name(Constraint c) {
  switch (c) {
    case Constraint::free: return "free";
    case Constraint::positive: return "positive";
    case Constraint::unit_interval: return "unit_interval";
  }
  throw Error("unknown constraint tag");
}

Constraint constraint_from_name(const std::string& name) {
  if (name == "free") return Constraint::free;
  if (name == "positive") return Constraint::positive;
  if (name == "unit_interval") return Constraint::unit_interval;
  throw Error("unknown constraint: " + name);
}

ParameterLayout::ParameterLayout(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const Block& b : blocks_) {
    if (b.size <= 0) throw Error("layout block '" + b.name + "' has non-positive size");
    for (const Block& other : blocks_)
      if (&other != &b && other.name == b.name)
        throw Error("duplicate layout block '" + b.name + "'");
    offsets_.push_back(dim_);
    dim_ += b.size;
  }
}

bool ParameterLayout::has_block(const std::string& name) const {
  for (const Block& b : blocks_)
    if (b.name == name) return true;
  return false;
}

const Block& ParameterLayout::block(const std::string& name) const {
  for (const Block& b : blocks_)
    if (b.name == name) return b;
  throw Error("layout has no block '" + name + "'");
}

int ParameterLayout::offset(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].name == name) return offsets_[i];
  throw Error("layout has no block '" + name + "'");
}

std::string ParameterLayout::coordinate_name(int k) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (k < offsets_[i] + blocks_[i].size)
      return blocks_[i].name + "[" + std::to_string(k - offsets_[i]) + "]";
  }
  throw Error("coordinate index out of range");
}

const VectorXd& ParameterSet::at(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw Error("parameter set has no entry '" + name + "'");
  return it->second;
}

void PriorConfig::validate() const {
  if (sigma_tau <= 0.0) throw Error("prior: sigma_tau must be positive");
  if (kind == PriorKind::product && (a <= 0.0 || b <= 0.0))
    throw Error("prior: Beta shapes must be positive");
}

ParameterLayout layout_for(const ModelSpec& model, int n_subjects, int p) {
  model.prior.validate();
  if (p < 1) throw Error("layout_for: p must be >= 1");
  std::vector<Block> blocks;
  if (model.prior.kind == PriorKind::product) {
    blocks.push_back({"eta", p, Constraint::free});
    blocks.push_back({"lambda", p, Constraint::unit_interval});
  } else {
    blocks.push_back({"beta", p, Constraint::free});
    blocks.push_back({"lambda", p, Constraint::positive});
  }
  blocks.push_back({"tau", 1, Constraint::positive});
  blocks.push_back({"beta0", 1, Constraint::free});
  if (model.has_sigma_y()) blocks.push_back({"sigma_y", 1, Constraint::positive});
  if (model.has_random_intercepts()) {
    if (n_subjects < 1) throw Error("layout_for: random intercepts need n_subjects >= 1");
    blocks.push_back({"b0r", n_subjects, Constraint::free});
  }
  return ParameterLayout(std::move(blocks));
}

std::pair<ParameterSet, double> to_constrained(const VectorXd& u, const ParameterLayout& layout) {
  if (u.size() != layout.dim()) throw Error("to_constrained: dimension mismatch");
  ParameterSet params;
  double log_jac = 0.0;
  int offset = 0;
  for (const Block& b : layout.blocks()) {
    VectorXd x(b.size);
    for (int i = 0; i < b.size; ++i) {
      const double ui = u(offset + i);
      switch (b.constraint) {
        case Constraint::free:
          x(i) = ui;
          break;
        case Constraint::positive:
          x(i) = std::exp(ui);
          log_jac += ui;
          break;
        case Constraint::unit_interval:
          x(i) = logistic(ui);
          log_jac += -softplus(-ui) - softplus(ui);
          break;
      }
    }
    params.values.emplace(b.name, std::move(x));
    offset += b.size;
  }
  return {std::move(params), log_jac};
}

VectorXd to_unconstrained(const ParameterSet& params, const ParameterLayout& layout) {
  VectorXd u(layout.dim());
  int offset = 0;
  for (const Block& b : layout.blocks()) {
    const VectorXd& x = params.at(b.name);
    if (x.size() != b.size) throw Error("to_unconstrained: size mismatch for '" + b.name + "'");
    for (int i = 0; i < b.size; ++i) {
      switch (b.constraint) {
        case Constraint::free:
          u(offset + i) = x(i);
          break;
        case Constraint::positive:
          if (x(i) <= 0.0) throw Error("positive parameter '" + b.name + "' is not positive");
          u(offset + i) = std::log(x(i));
          break;
        case Constraint::unit_interval:
          if (x(i) <= 0.0 || x(i) >= 1.0)
            throw Error("unit-interval parameter '" + b.name + "' outside (0, 1)");
          u(offset + i) = logit(x(i));
          break;
      }
    }
    offset += b.size;
  }
  return u;
}

double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -std::log(sd) - 0.5 * kLogTwoPi - 0.5 * z * z;
}

double half_normal_logpdf(double x, double scale) {
  return kLogTwo + normal_logpdf(x, 0.0, scale);
}

double half_cauchy_logpdf(double x, double scale) {
  const double z = x / scale;
  return kLogTwo - kLogPi - std::log(scale) - std::log1p(z * z);
}

double beta_logpdf(double x, double a, double b) {
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta;
}

namespace {

void require_finite(double value, const std::string& term) {
  if (!std::isfinite(value)) throw Error("non-finite log_joint term: " + term);
}

double log_likelihood(const ModelSpec& model, const ParameterSet& params, const Dataset& data,
                      const VectorXd& coef) {
  const double beta0 = params.at("beta0")(0);
  VectorXd eta = (data.X * coef).array() + beta0;
  if (model.has_random_intercepts()) {
    if (!data.has_subjects()) throw Error("random-intercept model needs subject indices");
    const VectorXd& b0r = params.at("b0r");
    for (int i = 0; i < data.n_rows(); ++i)
      eta(i) += b0r(data.subject_index[static_cast<std::size_t>(i)]);
  }

  double ll = 0.0;
  switch (model.family) {
    case Family::linear:
    case Family::random_intercept: {
      const double sigma_y = params.at("sigma_y")(0);
      for (int i = 0; i < data.n_rows(); ++i) ll += normal_logpdf(data.y(i), eta(i), sigma_y);
      break;
    }
    case Family::logistic: {
      for (int i = 0; i < data.n_rows(); ++i) ll += data.y(i) * eta(i) - softplus(eta(i));
      break;
    }
    case Family::poisson: {
      for (int i = 0; i < data.n_rows(); ++i)
        ll += data.y(i) * eta(i) - std::exp(std::min(eta(i), 300.0)) - std::lgamma(data.y(i) + 1.0);
      break;
    }
  }
  return ll;
}

}  // namespace

double log_joint(const ModelSpec& model, const ParameterSet& params, const Dataset& data) {
  model.prior.validate();
  const VectorXd& lambda = params.at("lambda");
  const double tau = params.at("tau")(0);
  const int p = static_cast<int>(lambda.size());

  VectorXd coef;
  double log_prior = 0.0;
  if (model.prior.kind == PriorKind::product) {
    const VectorXd& eta = params.at("eta");
    coef = eta.cwiseProduct(lambda);
    for (int j = 0; j < p; ++j) {
      log_prior += normal_logpdf(eta(j), 0.0, lambda(j) * tau);
      log_prior += beta_logpdf(lambda(j), model.prior.a, model.prior.b);
    }
  } else {
    coef = params.at("beta");
    for (int j = 0; j < p; ++j) {
      log_prior += normal_logpdf(coef(j), 0.0, lambda(j) * tau);
      log_prior += half_cauchy_logpdf(lambda(j), 1.0);
    }
  }
  require_finite(log_prior, "coefficient prior");

  log_prior += half_cauchy_logpdf(tau, model.prior.sigma_tau);
  log_prior += normal_logpdf(params.at("beta0")(0), 0.0, model.intercept_prior_scale);
  if (model.has_sigma_y())
    log_prior += half_normal_logpdf(params.at("sigma_y")(0), model.sigma_y_prior_scale);
  if (model.has_random_intercepts()) {
    const VectorXd& b0r = params.at("b0r");
    for (int i = 0; i < b0r.size(); ++i)
      log_prior += normal_logpdf(b0r(i), 0.0, model.random_intercept_prior_scale);
  }
  require_finite(log_prior, "scalar priors");

  const double ll = log_likelihood(model, params, data, coef);
  require_finite(ll, "likelihood");
  return ll + log_prior;
}

Dataset standardize_columns(const Dataset& data) {
  Dataset out = data;
  const int n = data.n_rows();
  for (int j = 0; j < data.n_cols(); ++j) {
    const double m = out.X.col(j).mean();
    out.X.col(j).array() -= m;
    const double var = out.X.col(j).squaredNorm() / n;
    if (var > 0.0) out.X.col(j) /= std::sqrt(var);
  }
  return out;
}

}  // namespace mirrorfdr::models
