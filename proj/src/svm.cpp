#include "mla/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "mla/parallel.hpp"

namespace mla {

double BinaryMachine::decision(const std::vector<double>& kernel_row) const {
  double s = bias;
  for (std::size_t t = 0; t < support.size(); ++t) s += coef[t] * kernel_row[support[t]];
  return s;
}

BinaryMachine smo_binary(const Eigen::MatrixXd& K, const std::vector<double>& y,
                         const SvmParams& params) {
  const std::size_t n = y.size();
  const double C = params.C;
  constexpr double tau = 1e-12;
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto Q = [&](std::size_t i, std::size_t j) {
    return y[i] * y[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };
  auto dual = [&] {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += alpha[t] * (G[t] - 1.0);
    return -0.5 * s;  // sum(alpha) - alpha'Q alpha / 2
  };

  BinaryMachine m;
  long long it = 0;
  double gap = 0.0;
  for (; it < params.max_iter; ++it) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = (i == n || j == n) ? 0.0 : gmax - gmin;
    if (gap < params.tol) break;

    const double ai = alpha[i], aj = alpha[j];
    const double Kii = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    const double Kjj = K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
    if (y[i] != y[j]) {
      double quad = Kii + Kjj + 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Kii + Kjj - 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai, dj = alpha[j] - aj;
    for (std::size_t t = 0; t < n; ++t) G[t] += Q(t, i) * di + Q(t, j) * dj;
    m.dual_trace.push_back(dual());
  }

  // offset from the free vectors, or the middle of the feasible range
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  if (!std::isfinite(rho)) rho = 0.0;

  m.alpha = alpha;
  m.y = y;
  m.bias = -rho;
  m.iterations = it;
  m.kkt_gap = gap;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      m.support.push_back(t);
      m.coef.push_back(alpha[t] * y[t]);
    }
  }
  return m;
}

SvmModel svm_train(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                   const SvmParams& params) {
  const auto n = static_cast<std::size_t>(gram.rows());
  if (gram.cols() != gram.rows()) throw std::invalid_argument("svm_train: gram must be square");
  if (labels.size() != n) throw std::invalid_argument("svm_train: label count mismatch");
  if (n == 0) throw std::invalid_argument("svm_train: empty training set");
  if (!(params.C > 0.0)) throw std::invalid_argument("svm_train: C must be positive");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const auto b = gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
      if (std::abs(a - b) > 1e-9 * scale) throw std::invalid_argument("svm_train: gram matrix is not symmetric");
    }
  }
  SvmModel model;
  model.params = params;
  model.n_train = n;
  std::set<int> cls(labels.begin(), labels.end());
  model.classes.assign(cls.begin(), cls.end());
  if (model.classes.size() < 2) throw std::invalid_argument("svm_train: need at least two classes");
  std::vector<int> positives;
  if (model.classes.size() == 2) {
    positives.push_back(model.classes[1]);
  } else {
    positives = model.classes;
  }
  model.machines.resize(positives.size());
  parallel_for(positives.size(), [&](std::size_t c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == positives[c] ? 1.0 : -1.0;
    model.machines[c] = smo_binary(gram, y, params);
    model.machines[c].positive_class = positives[c];
  });
  return model;
}

std::vector<double> svm_scores(const SvmModel& model, const std::vector<double>& kernel_row) {
  if (kernel_row.size() != model.n_train) throw std::invalid_argument("svm_predict: kernel row length mismatch");
  if (model.classes.size() == 2) {
    const double d = model.machines.at(0).decision(kernel_row);
    return {-d, d};
  }
  std::vector<double> s;
  for (const auto& m : model.machines) s.push_back(m.decision(kernel_row));
  return s;
}

int svm_predict(const SvmModel& model, const std::vector<double>& kernel_row) {
  const auto s = svm_scores(model, kernel_row);
  if (model.classes.size() == 2) return s[1] > 0.0 ? model.classes[1] : model.classes[0];
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] > s[best]) best = c;
  }
  return model.classes[best];
}

}  // namespace mla
