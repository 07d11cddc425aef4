#include "mla/ocknn.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace mla {

int ocknn_classify(const std::vector<double>& dissimilarities, double phi, int K) {
  if (K < 1) throw std::invalid_argument("ocknn: K must be at least 1");
  if (!(phi >= 0.0)) throw std::invalid_argument("ocknn: phi must be >= 0");
  long long count = 0;
  for (double d : dissimilarities) {
    if (d <= phi) ++count;
  }
  return count >= K ? 1 : 0;
}

std::vector<double> default_phi_grid(const Eigen::MatrixXd& D, int steps) {
  const Eigen::Index n = D.rows();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      lo = std::min(lo, D(i, j));
      hi = std::max(hi, D(i, j));
    }
  }
  lo = std::max(0.0, lo);
  std::vector<double> grid(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    grid[s] = steps == 1 ? lo : lo + (hi - lo) * s / (steps - 1);
  }
  return grid;
}

OcknnCalibration ocknn_calibrate(const Eigen::MatrixXd& D, std::vector<double> phi_grid,
                                 std::vector<int> k_grid) {
  const Eigen::Index n = D.rows();
  if (D.cols() != n) throw std::invalid_argument("ocknn_calibrate: matrix is not square");
  if (n < 2) throw std::invalid_argument("ocknn_calibrate: need at least two training items");
  if (phi_grid.empty()) phi_grid = default_phi_grid(D);
  if (k_grid.empty()) {
    for (int k = 1; k <= n; ++k) k_grid.push_back(k);
  }
  std::sort(phi_grid.begin(), phi_grid.end());
  std::sort(k_grid.begin(), k_grid.end());

  // sorted leave-one-out rows: count(d <= phi) is an upper_bound
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) rows[i].push_back(D(i, j));
    }
    std::sort(rows[i].begin(), rows[i].end());
  }
  OcknnCalibration cal;
  cal.phi_grid = phi_grid;
  cal.k_grid = k_grid;
  cal.M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(phi_grid.size()),
                                static_cast<Eigen::Index>(k_grid.size()));
  for (std::size_t p = 0; p < phi_grid.size(); ++p) {
    std::vector<long long> counts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      counts[i] = std::upper_bound(rows[i].begin(), rows[i].end(), phi_grid[p]) - rows[i].begin();
    }
    for (std::size_t q = 0; q < k_grid.size(); ++q) {
      long long acc = 0;
      for (long long c : counts) acc += c >= k_grid[q] ? 1 : 0;
      cal.M(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
          static_cast<double>(acc) / static_cast<double>(n);
    }
  }
  const Eigen::VectorXd P = cal.M.rowwise().sum();
  const Eigen::VectorXd Q = cal.M.colwise().sum();
  const double pmax = P.maxCoeff();
  for (Eigen::Index p = 0; p < P.size(); ++p) {
    if (P(p) == pmax) {
      cal.phi_star = phi_grid[static_cast<std::size_t>(p)];
      break;
    }
  }
  cal.k_star = k_grid.front();
  for (Eigen::Index q = 0; q < Q.size(); ++q) {
    if (Q(q) != 0.0) cal.k_star = k_grid[static_cast<std::size_t>(q)];
  }
  return cal;
}

}  // namespace mla
