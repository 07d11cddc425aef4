#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mla/signal.hpp"
#include "mla/transform.hpp"

namespace mla {

struct TreeNode {
  double start = 0.0;
  double end = 0.0;
  int level = 0;  // 0 for the root
  std::vector<std::size_t> children;  // ordered by start

  double length() const { return end - start; }
  bool leaf() const { return children.empty(); }
};

/// Nodes in breadth-first order; node 0 is the root. Children always have
/// larger indices than their parent.
struct IntervalTree {
  std::vector<TreeNode> nodes;

  std::size_t size() const { return nodes.size(); }
  const TreeNode& root() const { return nodes.front(); }
  int depth() const;  // root has depth 1
};

/// Root spans [a,b]; interval j at level k+1 hangs under the level-k
/// interval containing it.
IntervalTree signal_to_tree(const IntervalRepresentation& rep, double a, double b);
IntervalTree signal_to_tree(const IntervalRepresentation& rep);

struct TreeKernelParams {
  double delta = 0.0;   // length tolerance
  double lambda = 1.0;  // decay
  bool normalize = false;
  void validate() const;
};

/// Sum over all node pairs of the matching function C.
double tree_kernel_raw(const IntervalTree& t1, const IntervalTree& t2, const TreeKernelParams& p);
double tree_kernel(const IntervalTree& t1, const IntervalTree& t2, const TreeKernelParams& p);

struct ConvKernelParams {
  int K = 16;
  double gamma = 0.5;
  int np() const;
  int hnp() const { return np() / 2; }
  void validate() const;
};

/// Indicator over positions 1..L of membership in any interval of `level`.
std::vector<double> level_indicator(const std::vector<Interval>& level, std::size_t L);

/// Precomputed per-level indicators of a signal, for repeated kernel calls.
struct ConvFeatures {
  std::size_t L = 0;
  std::vector<std::vector<double>> window_sums;  // one per valid center
};

ConvFeatures conv_features(const Signal& s, const ConvKernelParams& p);
double conv_kernel(const ConvFeatures& x, const ConvFeatures& y, const ConvKernelParams& p);
double conv_kernel(const Signal& x, const Signal& y, const ConvKernelParams& p);

double linear_kernel(std::span<const double> x, std::span<const double> y);
double polynomial_kernel(std::span<const double> x, std::span<const double> y, int degree,
                         double gamma, double coef0);
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

struct GramMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  bool symmetric(double tol = 1e-9) const;
};

/// Fills the upper triangle with kernel(i, j) in parallel and mirrors it.
GramMatrix gram_matrix(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                       std::vector<std::string> ids = {});

struct PsdReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  bool psd = false;  // min >= -1e-8 * max
};

PsdReport psd_diagnostic(const Eigen::MatrixXd& m);

/// sqrt(k_ii + k_jj - 2 k_ij). Radicands below -1e-9 are an error.
Eigen::MatrixXd induced_distance(const GramMatrix& g);

Eigen::MatrixXd euclidean_distances(const std::vector<Signal>& items);
/// 1 - pearson correlation.
Eigen::MatrixXd pearson_distances(const std::vector<Signal>& items);

/// Mean normalized displacement of each item's nearest neighbour from its
/// temporal neighbours: (1/n) sum (|i-j| - 1)/(n-2). With literal = true the
/// unaveraged sum of |i-j-1|/(n-2) is returned instead.
double distance_optimality(const Eigen::MatrixXd& D, bool literal = false);

}  // namespace mla
