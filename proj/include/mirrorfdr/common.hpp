#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorfdr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw Error("mean of empty vector");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Quantile with linear interpolation between order statistics, q in [0, 1].
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw Error("quantile of empty vector");
  if (q < 0.0 || q > 1.0) throw Error("quantile level outside [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * xs[lo] + frac * xs[hi];
}

inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

inline double softplus(double x) {
  // log(1 + exp(x)) without overflow for large |x|
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace mirrorfdr
