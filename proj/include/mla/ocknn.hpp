#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mla {

/// 1 iff at least K of the dissimilarities are <= phi.
int ocknn_classify(const std::vector<double>& dissimilarities, double phi, int K);

struct OcknnCalibration {
  std::vector<double> phi_grid;
  std::vector<int> k_grid;
  Eigen::MatrixXd M;  // M(phi index, K index), leave-one-out acceptance rate
  double phi_star = 0.0;
  int k_star = 1;
};

/// Default phi grid: 50 evenly spaced values from the smallest to the largest
/// off-diagonal dissimilarity.
std::vector<double> default_phi_grid(const Eigen::MatrixXd& D, int steps = 50);

/// Leave-one-out selection over the training set's dissimilarity matrix.
/// Empty grids select the defaults (K from 1 to |T_p|).
OcknnCalibration ocknn_calibrate(const Eigen::MatrixXd& D, std::vector<double> phi_grid = {},
                                 std::vector<int> k_grid = {});

}  // namespace mla
