#include "polaron/pimc/blocking.hpp"

#include <algorithm>
#include <cmath>

#include "polaron/error.hpp"

namespace polaron::pimc {

BlockStats block_statistics(const std::vector<double>& block_means) {
  const int n = static_cast<int>(block_means.size());
  if (n < 2) throw InvalidArgument("need at least two blocks");
  double mean = 0.0;
  for (double v : block_means) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : block_means) var += (v - mean) * (v - mean);
  var /= (n - 1);
  return {mean, std::sqrt(var / n), n};
}

std::vector<double> block_means(const std::vector<double>& series, int blocks) {
  if (blocks < 1) throw InvalidArgument("need at least one block");
  const size_t len = series.size() / blocks;
  if (len == 0) throw InvalidArgument("series shorter than the block count");
  const size_t skip = series.size() - len * blocks;
  std::vector<double> out(blocks, 0.0);
  for (int b = 0; b < blocks; ++b) {
    double s = 0.0;
    for (size_t k = 0; k < len; ++k) s += series[skip + b * len + k];
    out[b] = s / len;
  }
  return out;
}

BlockingCurve blocking_curve(const std::vector<double>& series, int min_blocks) {
  if (series.size() < 2) throw InvalidArgument("series too short");
  BlockingCurve curve;
  std::vector<double> level = series;
  while (static_cast<int>(level.size()) >= std::max(min_blocks, 2)) {
    const double n = static_cast<double>(level.size());
    double mean = 0.0;
    for (double v : level) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : level) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    const double se = std::sqrt(var / n);
    curve.stderr.push_back(se);
    curve.stderr_error.push_back(se / std::sqrt(2.0 * (n - 1.0)));
    std::vector<double> next(level.size() / 2);
    for (size_t k = 0; k < next.size(); ++k) next[k] = 0.5 * (level[2 * k] + level[2 * k + 1]);
    level.swap(next);
  }
  const size_t n_levels = curve.stderr.size();
  if (n_levels == 0) return curve;
  curve.plateau_stderr = curve.stderr.back();
  // Plateau: the last three levels agree within their combined uncertainties.
  if (n_levels >= 3) {
    curve.plateau = true;
    for (size_t l = n_levels - 2; l < n_levels; ++l) {
      const double diff = std::abs(curve.stderr[l] - curve.stderr[l - 1]);
      const double tol = 2.0 * std::hypot(curve.stderr_error[l], curve.stderr_error[l - 1]);
      if (diff > tol) curve.plateau = false;
    }
    curve.plateau_stderr = *std::max_element(curve.stderr.end() - 3, curve.stderr.end());
  }
  if (curve.stderr[0] > 0.0) {
    const double ratio = curve.plateau_stderr / curve.stderr[0];
    curve.autocorrelation_time = 0.5 * ratio * ratio;
  }
  return curve;
}

}  // namespace polaron::pimc
