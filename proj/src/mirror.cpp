#include "mirrorfdr/mirror.hpp"

#include <algorithm>
#include <numbers>

#include "mirrorfdr/rng.hpp"

namespace mirrorfdr::mirror {

MirrorSamples mirror_samples(const MatrixXd& beta_draws, std::uint64_t seed) {
  const int rows = static_cast<int>(beta_draws.rows());
  if (rows < 4 || rows % 2 != 0)
    throw Error("mirror_samples: draw count must be even and >= 4, got " + std::to_string(rows));
  const int n = rows / 2;
  const int p = static_cast<int>(beta_draws.cols());

  Rng rng(seed);
  const std::vector<int> order = rng.permutation(rows);

  MirrorSamples ms;
  ms.n_pairs = n;
  ms.w.resize(n, p);
  for (int s = 0; s < n; ++s) {
    const int r1 = order[static_cast<std::size_t>(s)];
    const int r2 = order[static_cast<std::size_t>(n + s)];
    for (int j = 0; j < p; ++j) {
      const double w = mirror_transform(beta_draws(r1, j), beta_draws(r2, j));
      if (!std::isfinite(w)) throw Error("mirror_samples: non-finite mirror value");
      ms.w(s, j) = w;
    }
  }
  return ms;
}

std::pair<std::optional<double>, double> optimal_threshold(const MirrorSamples& ms, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) throw Error("optimal_threshold: alpha must lie in (0, 1)");
  const double n = ms.n_pairs;

  // Pooled counts over all entries: sum_j P(w_j > t) = #{entries > t} / N,
  // so one sorted copy of the entries answers every candidate.
  std::vector<double> entries(ms.w.data(), ms.w.data() + ms.w.size());
  std::sort(entries.begin(), entries.end());

  std::vector<double> candidates;
  candidates.reserve(entries.size());
  for (double v : entries) {
    const double a = std::abs(v);
    if (a > 0.0) candidates.push_back(a);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double t : candidates) {
    // strictly below -t / strictly above t
    const auto below = std::lower_bound(entries.begin(), entries.end(), -t) - entries.begin();
    const auto above = entries.end() - std::upper_bound(entries.begin(), entries.end(), t);
    const double neg_mass = static_cast<double>(below) / n;
    const double pos_mass = static_cast<double>(above) / n;
    const double fdp = neg_mass / std::max(pos_mass, 1.0);
    if (fdp <= alpha) return {t, fdp};
  }
  return {std::nullopt, std::numeric_limits<double>::quiet_NaN()};
}

VectorXd inclusion_probabilities(const MirrorSamples& ms, double t_alpha) {
  if (!(t_alpha > 0.0) || !std::isfinite(t_alpha))
    throw Error("inclusion_probabilities: threshold must be finite and positive");
  const int p = ms.n_coefficients();
  VectorXd pi(p);
  for (int j = 0; j < p; ++j) {
    int count = 0;
    for (int s = 0; s < ms.n_pairs; ++s)
      if (ms.w(s, j) > t_alpha) ++count;
    pi(j) = static_cast<double>(count) / ms.n_pairs;
  }
  return pi;
}

TauSelection select_covariates(const VectorXd& pi, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) throw Error("select_covariates: alpha must lie in (0, 1)");
  const int p = static_cast<int>(pi.size());
  for (int j = 0; j < p; ++j)
    if (pi(j) < 0.0 || pi(j) > 1.0)
      throw Error("select_covariates: inclusion probabilities must lie in [0, 1]");

  std::vector<double> candidates(pi.data(), pi.data() + p);
  candidates.push_back(0.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double tau : candidates) {
    double numerator = 0.0;
    int count = 0;
    for (int j = 0; j < p; ++j) {
      if (pi(j) > tau) {
        numerator += 1.0 - pi(j);
        ++count;
      }
    }
    const double fdp = numerator / std::max(count, 1);
    if (fdp <= alpha) {
      TauSelection out;
      out.tau_alpha = tau;
      out.estimated_fdp = fdp;
      for (int j = 0; j < p; ++j)
        if (pi(j) > tau) out.selected.push_back(j);
      return out;
    }
  }
  return {};
}

SelectionResult bayes_ms(const MatrixXd& beta_draws, double alpha, std::uint64_t seed) {
  if (alpha <= 0.0 || alpha >= 1.0) throw Error("bayes_ms: alpha must lie in (0, 1)");
  SelectionResult result;
  result.alpha = alpha;

  const MirrorSamples ms = mirror_samples(beta_draws, seed);
  auto [t_alpha, fdp_t] = optimal_threshold(ms, alpha);
  result.t_alpha = t_alpha;
  result.estimated_fdp_at_t = fdp_t;
  if (!t_alpha) {
    result.inclusion_probs = VectorXd::Zero(ms.n_coefficients());
    return result;
  }

  result.inclusion_probs = inclusion_probabilities(ms, *t_alpha);
  TauSelection tau = select_covariates(result.inclusion_probs, alpha);
  result.tau_alpha = tau.tau_alpha;
  result.estimated_fdp_at_tau = tau.estimated_fdp;
  if (tau.tau_alpha) result.selected = std::move(tau.selected);
  return result;
}

double folded_normal_mean(double mu, double sigma) {
  if (sigma <= 0.0) throw Error("folded_normal_mean: sigma must be positive");
  const double z = mu / sigma;
  return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) +
         mu * (1.0 - 2.0 * normal_cdf(-z));
}

double folded_normal_sd(double mu, double sigma) {
  const double m = folded_normal_mean(mu, sigma);
  return std::sqrt(std::max(mu * mu + sigma * sigma - m * m, 0.0));
}

WNormalApprox analytic_w_distribution(double mu, double sigma) {
  if (sigma <= 0.0) throw Error("analytic_w_distribution: sigma must be positive");
  // Sum and difference of two independent N(mu, sigma^2) draws.
  const double spread = std::sqrt(2.0) * sigma;
  const double mean_sum = folded_normal_mean(2.0 * mu, spread);
  const double sd_sum = folded_normal_sd(2.0 * mu, spread);
  const double mean_diff = folded_normal_mean(0.0, spread);
  const double sd_diff = folded_normal_sd(0.0, spread);
  WNormalApprox approx;
  approx.mean = mean_sum - mean_diff;
  approx.sd = std::sqrt(sd_sum * sd_sum + sd_diff * sd_diff);
  return approx;
}

}  // namespace mirrorfdr::mirror
