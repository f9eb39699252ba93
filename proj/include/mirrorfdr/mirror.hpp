#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mirrorfdr/common.hpp"

namespace mirrorfdr::mirror {

// The mirror transform |a + b| - |a - b|; equals 2*sign(ab)*min(|a|, |b|).
inline double mirror_transform(double a, double b) { return std::abs(a + b) - std::abs(a - b); }

/// Monte-Carlo mirror draws: w(s, j) built from two independent posterior
/// draws of coefficient j.
struct MirrorSamples {
  MatrixXd w;        // N x p
  int n_pairs = 0;   // N

  int n_coefficients() const { return static_cast<int>(w.cols()); }
};

struct SelectionResult {
  std::optional<double> t_alpha;
  VectorXd inclusion_probs;
  std::optional<double> tau_alpha;
  std::vector<int> selected;  // 0-based coefficient indices
  double alpha = 0.0;
  double estimated_fdp_at_t = std::numeric_limits<double>::quiet_NaN();
  double estimated_fdp_at_tau = std::numeric_limits<double>::quiet_NaN();
};

// Rows are shuffled once (seeded), split into two halves, and combined
// pointwise with the mirror transform. Requires an even draw count >= 4.
MirrorSamples mirror_samples(const MatrixXd& beta_draws, std::uint64_t seed);

/// Smallest positive candidate threshold whose pooled FDP estimate is at
/// or below alpha. Candidates are the distinct absolute values of all w
/// entries; counts are probability-averaged over draws:
///   FDP(t) = sum_j P(w_j < -t) / max(sum_j P(w_j > t), 1).
/// Returns {threshold or nullopt, FDP estimate at the threshold}.
std::pair<std::optional<double>, double> optimal_threshold(const MirrorSamples& ms, double alpha);

// pi_j = fraction of draws of coefficient j strictly above t_alpha.
VectorXd inclusion_probabilities(const MirrorSamples& ms, double t_alpha);

struct TauSelection {
  std::optional<double> tau_alpha;
  std::vector<int> selected;
  double estimated_fdp = std::numeric_limits<double>::quiet_NaN();
};

/// Smallest tau among the distinct values of pi (and 0) with
///   FDP(tau) = sum_j (1 - pi_j) 1(pi_j > tau) / max(#{pi_j > tau}, 1) <= alpha;
/// selection is { j : pi_j > tau }.
TauSelection select_covariates(const VectorXd& pi, double alpha);

// Full pipeline: mirror draws -> t threshold -> inclusion probabilities
// -> tau threshold -> selected set.
SelectionResult bayes_ms(const MatrixXd& beta_draws, double alpha, std::uint64_t seed);

/// Normal approximation to the mirror-statistic distribution when the
/// posterior of the coefficient is N(mu, sigma^2): the difference of the
/// folded versions of N(2*mu, 2*sigma^2) and N(0, 2*sigma^2).
struct WNormalApprox {
  double mean = 0.0;
  double sd = 0.0;
};

WNormalApprox analytic_w_distribution(double mu, double sigma);

// Folded-normal moments of |X| for X ~ N(mu, sigma^2).
double folded_normal_mean(double mu, double sigma);
double folded_normal_sd(double mu, double sigma);

}  // namespace mirrorfdr::mirror
