#include "mirrorfdr/advi.hpp"

#include <chrono>

#include "mirrorfdr/rng.hpp"

namespace mirrorfdr::advi {

namespace {
constexpr double kLogTwoPiE = 2.837877066409345;  // log(2*pi*e)

void fill_standard_normal(Rng& rng, MatrixXd& z) {
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.normal();
}
}  // namespace

void AdviConfig::validate() const {
  if (n_mc < 1) throw Error("advi: n_mc must be >= 1");
  if (iterations < 0) throw Error("advi: iterations must be >= 0");
  if (step_size <= 0.0) throw Error("advi: step_size must be positive");
  if (decay_rate <= 0.0 || decay_rate > 1.0) throw Error("advi: decay_rate must lie in (0, 1]");
  if (epsilon <= 0.0) throw Error("advi: epsilon must be positive");
}

double entropy(const VariationalPosterior& q) {
  return q.log_scales.sum() + 0.5 * kLogTwoPiE * q.dim();
}

double elbo_estimate(const VariationalPosterior& q, const DifferentiableTarget& target, int n_mc,
                     std::uint64_t seed) {
  if (q.dim() != target.dim()) throw Error("elbo_estimate: dimension mismatch");
  if (n_mc < 1) throw Error("elbo_estimate: n_mc must be >= 1");
  Rng rng(seed);
  MatrixXd z(n_mc, q.dim());
  fill_standard_normal(rng, z);

  const VectorXd s = q.scales();
  double joint = 0.0;
  for (int m = 0; m < n_mc; ++m) {
    const VectorXd u = q.locations + s.cwiseProduct(z.row(m).transpose());
    joint += target.value(u);
  }
  return joint / n_mc + entropy(q);
}

double elbo_gradient(const VariationalPosterior& q, const DifferentiableTarget& target, int n_mc,
                     std::uint64_t seed, VectorXd& grad_locations, VectorXd& grad_log_scales) {
  if (q.dim() != target.dim()) throw Error("elbo_gradient: dimension mismatch");
  if (n_mc < 1) throw Error("elbo_gradient: n_mc must be >= 1");
  const int dim = q.dim();
  Rng rng(seed);
  MatrixXd z(n_mc, dim);
  fill_standard_normal(rng, z);

  const VectorXd s = q.scales();
  grad_locations = VectorXd::Zero(dim);
  grad_log_scales = VectorXd::Zero(dim);
  VectorXd grad_u(dim);
  double joint = 0.0;
  for (int m = 0; m < n_mc; ++m) {
    const VectorXd zm = z.row(m).transpose();
    const VectorXd u = q.locations + s.cwiseProduct(zm);
    joint += target.value_and_gradient(u, grad_u);
    grad_locations += grad_u;
    grad_log_scales += grad_u.cwiseProduct(s).cwiseProduct(zm);
  }
  grad_locations /= n_mc;
  grad_log_scales /= n_mc;
  grad_log_scales.array() += 1.0;  // analytic entropy gradient

  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(grad_locations(k)) || !std::isfinite(grad_log_scales(k)))
      throw Error("non-finite ELBO gradient for coordinate " + q.layout.coordinate_name(k));
  }
  return joint / n_mc + entropy(q);
}

FitTrace fit(const DifferentiableTarget& target, const AdviConfig& config) {
  config.validate();
  const int dim = target.dim();
  const auto start = std::chrono::steady_clock::now();

  VariationalPosterior q;
  q.layout = target.layout();
  q.locations = VectorXd::Zero(dim);
  if (config.init_location_scale > 0.0) {
    Rng init_rng(derive_seed(config.seed, 0xadd1));
    for (int k = 0; k < dim; ++k) q.locations(k) = init_rng.normal(0.0, config.init_location_scale);
  }
  q.log_scales = VectorXd::Constant(dim, config.init_log_scale);

  FitTrace trace;
  trace.iterations.reserve(static_cast<std::size_t>(config.iterations));
  trace.smoothed_elbo.reserve(static_cast<std::size_t>(config.iterations));

  VectorXd acc_loc = VectorXd::Zero(dim);
  VectorXd acc_ls = VectorXd::Zero(dim);
  VectorXd g_loc(dim), g_ls(dim);
  double smoothed = 0.0;
  constexpr double kEmaWeight = 0.05;

  for (int t = 0; t < config.iterations; ++t) {
    double elbo;
    try {
      elbo = elbo_gradient(q, target, config.n_mc, derive_seed(config.seed, static_cast<std::uint64_t>(t)),
                           g_loc, g_ls);
    } catch (const Error& e) {
      throw Error("advi diverged at iteration " + std::to_string(t) + " (" + e.what() + "); " +
                  std::to_string(trace.smoothed_elbo.size()) + " trace points completed");
    }
    if (!std::isfinite(elbo))
      throw Error("advi diverged at iteration " + std::to_string(t) + " (non-finite ELBO); " +
                  std::to_string(trace.smoothed_elbo.size()) + " trace points completed");

    acc_loc = config.decay_rate * g_loc.array().square().matrix() + (1.0 - config.decay_rate) * acc_loc;
    acc_ls = config.decay_rate * g_ls.array().square().matrix() + (1.0 - config.decay_rate) * acc_ls;
    q.locations.array() +=
        config.step_size * g_loc.array() / (config.epsilon + acc_loc.array().sqrt());
    q.log_scales.array() +=
        config.step_size * g_ls.array() / (config.epsilon + acc_ls.array().sqrt());

    smoothed = t == 0 ? elbo : (1.0 - kEmaWeight) * smoothed + kEmaWeight * elbo;
    trace.iterations.push_back(t);
    trace.smoothed_elbo.push_back(smoothed);
  }

  trace.posterior = std::move(q);
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

MatrixXd sample_posterior(const VariationalPosterior& q, int count, std::uint64_t seed) {
  if (count < 1) throw Error("sample_posterior: count must be >= 1");
  Rng rng(seed);
  MatrixXd z(count, q.dim());
  fill_standard_normal(rng, z);
  const VectorXd s = q.scales();
  for (int i = 0; i < count; ++i)
    z.row(i) = (q.locations + s.cwiseProduct(z.row(i).transpose())).transpose();
  return z;
}

}  // namespace mirrorfdr::advi
