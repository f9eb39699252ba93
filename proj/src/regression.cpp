#include "mirrorfdr/regression.hpp"

#include "mirrorfdr/rng.hpp"

namespace mirrorfdr::models {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;
constexpr double kMaxExpArg = 300.0;
}  // namespace

RegressionTarget::RegressionTarget(ModelSpec model, Dataset data)
    : model_(std::move(model)), data_(std::move(data)) {
  p_ = data_.n_cols();
  const int n_subjects = model_.has_random_intercepts() ? data_.n_subjects() : 0;
  layout_ = layout_for(model_, n_subjects, p_);
  if (model_.has_random_intercepts() && !data_.has_subjects())
    throw Error("random-intercept model needs subject indices in the dataset");
}

double RegressionTarget::value_and_gradient(const VectorXd& u, VectorXd& grad) const {
  if (u.size() != layout_.dim()) throw Error("target: dimension mismatch");
  grad.setZero(layout_.dim());

  const bool product = model_.prior.kind == PriorKind::product;
  const int off_coef = layout_.offset(product ? "eta" : "beta");
  const int off_lambda = layout_.offset("lambda");
  const int off_tau = layout_.offset("tau");
  const int off_beta0 = layout_.offset("beta0");
  const int off_sigma = model_.has_sigma_y() ? layout_.offset("sigma_y") : -1;
  const int off_b0r = model_.has_random_intercepts() ? layout_.offset("b0r") : -1;

  double value = 0.0;

  // Constrained values and transform Jacobian.
  const auto raw = u.segment(off_coef, p_);            // eta or beta, free
  VectorXd lambda(p_), dlambda_du(p_);
  for (int j = 0; j < p_; ++j) {
    const double ul = u(off_lambda + j);
    if (product) {
      const double l = logistic(ul);
      lambda(j) = l;
      dlambda_du(j) = l * (1.0 - l);
      value += -softplus(-ul) - softplus(ul);  // log-Jacobian of the logistic map
      grad(off_lambda + j) += 1.0 - 2.0 * l;
    } else {
      lambda(j) = std::exp(ul);
      dlambda_du(j) = lambda(j);
      value += ul;
      grad(off_lambda + j) += 1.0;
    }
  }
  const double tau = std::exp(u(off_tau));
  value += u(off_tau);
  grad(off_tau) += 1.0;
  const double beta0 = u(off_beta0);
  double sigma_y = 1.0;
  if (off_sigma >= 0) {
    sigma_y = std::exp(u(off_sigma));
    value += u(off_sigma);
    grad(off_sigma) += 1.0;
  }

  // Linear predictor and likelihood.
  const VectorXd coef = product ? VectorXd(raw.cwiseProduct(lambda)) : VectorXd(raw);
  const int n = data_.n_rows();
  VectorXd linpred = (data_.X * coef).array() + beta0;
  if (off_b0r >= 0)
    for (int i = 0; i < n; ++i)
      linpred(i) += u(off_b0r + data_.subject_index[static_cast<std::size_t>(i)]);

  VectorXd dll(n);
  switch (model_.family) {
    case Family::linear:
    case Family::random_intercept: {
      const double inv_var = 1.0 / (sigma_y * sigma_y);
      double rss = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = data_.y(i) - linpred(i);
        rss += r * r;
        dll(i) = r * inv_var;
      }
      value += -n * std::log(sigma_y) - 0.5 * n * kLogTwoPi - 0.5 * rss * inv_var;
      // d/d(sigma_y), chained through sigma_y = exp(u) below
      grad(off_sigma) += (-n / sigma_y + rss * inv_var / sigma_y) * sigma_y;
      break;
    }
    case Family::logistic: {
      for (int i = 0; i < n; ++i) {
        value += data_.y(i) * linpred(i) - softplus(linpred(i));
        dll(i) = data_.y(i) - logistic(linpred(i));
      }
      break;
    }
    case Family::poisson: {
      for (int i = 0; i < n; ++i) {
        const double mu = std::exp(std::min(linpred(i), kMaxExpArg));
        value += data_.y(i) * linpred(i) - mu - std::lgamma(data_.y(i) + 1.0);
        dll(i) = data_.y(i) - mu;
      }
      break;
    }
  }

  const VectorXd xtd = data_.X.transpose() * dll;
  grad(off_beta0) += dll.sum();
  if (off_b0r >= 0)
    for (int i = 0; i < n; ++i)
      grad(off_b0r + data_.subject_index[static_cast<std::size_t>(i)]) += dll(i);

  // Coefficient priors.
  double dtau = 0.0;  // gradient w.r.t. constrained tau
  const double inv_tau2 = 1.0 / (tau * tau);
  for (int j = 0; j < p_; ++j) {
    const double l = lambda(j);
    const double sd = l * tau;
    const double x = raw(j);
    value += normal_logpdf(x, 0.0, sd);
    const double dx_prior = -x / (sd * sd);
    dtau += -1.0 / tau + x * x * inv_tau2 / (l * l * tau);
    double dl = -1.0 / l + x * x / (l * l * l * tau * tau);
    if (product) {
      value += beta_logpdf(l, model_.prior.a, model_.prior.b);
      dl += (model_.prior.a - 1.0) / l - (model_.prior.b - 1.0) / (1.0 - l);
      // likelihood reaches eta and lambda through coef_j = eta_j * lambda_j
      grad(off_coef + j) += l * xtd(j) + dx_prior;
      dl += x * xtd(j);
    } else {
      value += half_cauchy_logpdf(l, 1.0);
      dl += -2.0 * l / (1.0 + l * l);
      grad(off_coef + j) += xtd(j) + dx_prior;
    }
    grad(off_lambda + j) += dl * dlambda_du(j);
  }

  // Global scale, intercept, noise scale, random intercepts.
  value += half_cauchy_logpdf(tau, model_.prior.sigma_tau);
  dtau += -2.0 * tau / (model_.prior.sigma_tau * model_.prior.sigma_tau + tau * tau);
  grad(off_tau) += dtau * tau;

  value += normal_logpdf(beta0, 0.0, model_.intercept_prior_scale);
  grad(off_beta0) += -beta0 / (model_.intercept_prior_scale * model_.intercept_prior_scale);

  if (off_sigma >= 0) {
    value += half_normal_logpdf(sigma_y, model_.sigma_y_prior_scale);
    grad(off_sigma) +=
        (-sigma_y / (model_.sigma_y_prior_scale * model_.sigma_y_prior_scale)) * sigma_y;
  }
  if (off_b0r >= 0) {
    const double s = model_.random_intercept_prior_scale;
    const int n_subj = layout_.block("b0r").size;
    for (int i = 0; i < n_subj; ++i) {
      value += normal_logpdf(u(off_b0r + i), 0.0, s);
      grad(off_b0r + i) += -u(off_b0r + i) / (s * s);
    }
  }

  return value;
}

MatrixXd coefficient_draws(const advi::VariationalPosterior& posterior, const ModelSpec& model,
                           const ParameterLayout& layout, int count, std::uint64_t seed) {
  if (count < 2) throw Error("coefficient_draws: count must be >= 2");
  const bool product = model.prior.kind == PriorKind::product;
  const int off_coef = layout.offset(product ? "eta" : "beta");
  const int p = layout.block(product ? "eta" : "beta").size;
  const int off_lambda = product ? layout.offset("lambda") : -1;

  const MatrixXd u = advi::sample_posterior(posterior, count, seed);
  MatrixXd beta(count, p);
  for (int s = 0; s < count; ++s) {
    for (int j = 0; j < p; ++j) {
      const double raw = u(s, off_coef + j);
      beta(s, j) = product ? raw * logistic(u(s, off_lambda + j)) : raw;
    }
  }
  return beta;
}

advi::FitTrace fit_model(const ModelSpec& model, const Dataset& data,
                         const advi::AdviConfig& config) {
  const Dataset standardized = standardize_columns(data);
  const RegressionTarget target(model, standardized);
  return advi::fit(target, config);
}

}  // namespace mirrorfdr::models
