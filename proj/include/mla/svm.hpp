#pragma once

#include <vector>

#include <Eigen/Dense>

namespace mla {

struct SvmParams {
  double C = 1.0;
  double tol = 1e-3;
  long long max_iter = 10000000;
};

/// One binary machine; decision(x) = sum_i coef_i k(x_i, x) + bias.
struct BinaryMachine {
  int positive_class = 0;
  std::vector<std::size_t> support;  // training indices with alpha > 0
  std::vector<double> coef;          // alpha_i * y_i for each support index
  std::vector<double> alpha;         // full dual vector, kept for diagnostics
  std::vector<double> y;
  double bias = 0.0;
  long long iterations = 0;
  double kkt_gap = 0.0;
  std::vector<double> dual_trace;    // dual objective after each step

  double decision(const std::vector<double>& kernel_row) const;
};

struct SvmModel {
  std::vector<int> classes;  // sorted
  std::vector<BinaryMachine> machines;
  std::size_t n_train = 0;
  SvmParams params;
};

/// SMO with maximal-violating-pair selection on a precomputed Gram matrix.
/// Two classes train one machine (the larger label positive); more classes
/// train one-vs-rest.
SvmModel svm_train(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                   const SvmParams& params = {});

/// kernel_row holds k(x_i, x) for every training item i.
int svm_predict(const SvmModel& model, const std::vector<double>& kernel_row);

/// Decision values per class (for two classes: -d for the first, d for the second).
std::vector<double> svm_scores(const SvmModel& model, const std::vector<double>& kernel_row);

BinaryMachine smo_binary(const Eigen::MatrixXd& gram, const std::vector<double>& y,
                         const SvmParams& params);

}  // namespace mla
