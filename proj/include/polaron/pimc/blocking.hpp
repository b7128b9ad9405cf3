#pragma once

#include <vector>

namespace polaron::pimc {

struct BlockStats {
  double mean = 0.0;
  double stderr = 0.0;
  int blocks = 0;
};

/// Mean and standard error from equal-length block averages.
BlockStats block_statistics(const std::vector<double>& block_means);

/// Averages of `blocks` consecutive equal-length chunks; a remainder at the
/// front of the series is dropped.
std::vector<double> block_means(const std::vector<double>& series, int blocks);

/// Standard error of the mean after repeated pairwise blocking.
struct BlockingCurve {
  std::vector<double> stderr;        // level 0 is the naive estimate
  std::vector<double> stderr_error;  // statistical uncertainty of each level
  bool plateau = false;
  double plateau_stderr = 0.0;
  double autocorrelation_time = 0.0;  // in units of series entries
};

BlockingCurve blocking_curve(const std::vector<double>& series, int min_blocks = 32);

}  // namespace polaron::pimc
