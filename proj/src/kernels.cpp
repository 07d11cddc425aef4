#include "mla/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mla/parallel.hpp"

namespace mla {

int IntervalTree::depth() const {
  if (nodes.empty()) return 0;
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.level);
  return d + 1;
}

IntervalTree signal_to_tree(const IntervalRepresentation& rep, double a, double b) {
  IntervalTree t;
  t.nodes.push_back({a, b, 0, {}});
  // indices of the previous level's nodes, in start order
  std::vector<std::size_t> prev{0};
  for (std::size_t k = 0; k < rep.levels.size(); ++k) {
    std::vector<std::size_t> cur;
    std::size_t p = 0;
    for (const auto& iv : rep.levels[k]) {
      const std::size_t idx = t.nodes.size();
      t.nodes.push_back({iv.start, iv.end, static_cast<int>(k) + 1, {}});
      if (k == 0) {
        t.nodes[0].children.push_back(idx);
      } else {
        while (p < prev.size()) {
          const auto& par = t.nodes[prev[p]];
          if (iv.start >= par.start - 1e-9 && iv.end <= par.end + 1e-9) break;
          ++p;
        }
        if (p == prev.size()) throw std::invalid_argument("representation is not nested");
        t.nodes[prev[p]].children.push_back(idx);
      }
      cur.push_back(idx);
    }
    prev = std::move(cur);
  }
  return t;
}

IntervalTree signal_to_tree(const IntervalRepresentation& rep) {
  return signal_to_tree(rep, rep.domain_start(), rep.domain_end());
}

void TreeKernelParams::validate() const {
  if (!(delta >= 0.0)) throw std::invalid_argument("tree kernel: delta must be >= 0");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("tree kernel: lambda must be in (0,1]");
}

double tree_kernel_raw(const IntervalTree& t1, const IntervalTree& t2, const TreeKernelParams& p) {
  p.validate();
  const std::size_t n1 = t1.size(), n2 = t2.size();
  std::vector<double> C(n1 * n2, 0.0);
  // children come after parents, so a reverse sweep sees them first
  for (std::size_t i = n1; i-- > 0;) {
    const auto& a = t1.nodes[i];
    for (std::size_t j = n2; j-- > 0;) {
      const auto& b = t2.nodes[j];
      double c = 0.0;
      if (std::abs(a.length() - b.length()) <= p.delta) {
        if (a.leaf() && b.leaf()) {
          c = p.lambda;
        } else if (!a.leaf() && !b.leaf() && a.children.size() == b.children.size()) {
          c = p.lambda;
          for (std::size_t q = 0; q < a.children.size(); ++q) {
            c *= 1.0 + C[a.children[q] * n2 + b.children[q]];
          }
        }
      }
      C[i * n2 + j] = c;
    }
  }
  // summing in sorted order makes K(t1,t2) and K(t2,t1) bit-identical
  std::sort(C.begin(), C.end());
  double total = 0.0;
  for (double c : C) total += c;
  return total;
}

double tree_kernel(const IntervalTree& t1, const IntervalTree& t2, const TreeKernelParams& p) {
  const double k12 = tree_kernel_raw(t1, t2, p);
  if (!p.normalize) return k12;
  const double k11 = tree_kernel_raw(t1, t1, p);
  const double k22 = tree_kernel_raw(t2, t2, p);
  if (k11 <= 0.0 || k22 <= 0.0) return 0.0;
  return k12 / std::sqrt(k11 * k22);
}

int ConvKernelParams::np() const {
  const int half = static_cast<int>(std::lround(gamma * K / 2.0));
  return std::max(2, 2 * half);
}

void ConvKernelParams::validate() const {
  if (K < 2) throw std::invalid_argument("conv kernel: K must be at least 2");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("conv kernel: gamma must be in (0,1]");
}

std::vector<double> level_indicator(const std::vector<Interval>& level, std::size_t L) {
  std::vector<double> b(L, 0.0);
  for (const auto& iv : level) {
    const auto lo = static_cast<long long>(std::ceil(iv.start - 1e-9));
    const auto hi = static_cast<long long>(std::floor(iv.end + 1e-9));
    for (long long x = std::max<long long>(lo, 1); x <= std::min<long long>(hi, static_cast<long long>(L)); ++x) {
      b[static_cast<std::size_t>(x - 1)] = 1.0;
    }
  }
  return b;
}

ConvFeatures conv_features(const Signal& s, const ConvKernelParams& p) {
  p.validate();
  const auto rep = horizontal_sampling(normalize_unit(s), p.K);
  ConvFeatures f;
  f.L = s.size();
  std::vector<std::vector<double>> B;
  for (const auto& lv : rep.levels) B.push_back(level_indicator(lv, f.L));
  const int hnp = p.hnp();
  for (int k = 1 + hnp; k <= p.K - hnp + 1; ++k) {
    std::vector<double> w(f.L, 0.0);
    for (int j = k - hnp + 1; j <= k + hnp - 1; ++j) {
      for (std::size_t x = 0; x < f.L; ++x) w[x] += B[j - 1][x];
    }
    f.window_sums.push_back(std::move(w));
  }
  return f;
}

double conv_kernel(const ConvFeatures& x, const ConvFeatures& y, const ConvKernelParams& p) {
  if (x.L != y.L) throw std::invalid_argument("conv kernel: signals differ in length");
  if (x.window_sums.size() != y.window_sums.size()) {
    throw std::invalid_argument("conv kernel: features built with different parameters");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < x.window_sums.size(); ++c) {
    double dot = 0.0;
    for (std::size_t i = 0; i < x.L; ++i) dot += x.window_sums[c][i] * y.window_sums[c][i];
    total += dot;
  }
  return total / static_cast<double>(p.np());
}

double conv_kernel(const Signal& x, const Signal& y, const ConvKernelParams& p) {
  if (x.size() != y.size()) throw std::invalid_argument("conv kernel: signals differ in length");
  return conv_kernel(conv_features(x, p), conv_features(y, p), p);
}

double linear_kernel(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear kernel: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double polynomial_kernel(std::span<const double> x, std::span<const double> y, int degree,
                         double gamma, double coef0) {
  return std::pow(gamma * linear_kernel(x, y) + coef0, degree);
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw std::invalid_argument("rbf kernel: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] - y[i]) * (x[i] - y[i]);
  return std::exp(-gamma * d);
}

bool GramMatrix::symmetric(double tol) const {
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < values.cols(); ++j) {
      if (std::abs(values(i, j) - values(j, i)) > tol) return false;
    }
  }
  return true;
}

GramMatrix gram_matrix(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                       std::vector<std::string> ids) {
  GramMatrix g;
  if (ids.empty()) {
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != n) throw std::invalid_argument("gram_matrix: id count mismatch");
  g.ids = std::move(ids);
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(i, j);
    }
  });
  for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) g.values(i, j) = g.values(j, i);
  }
  return g;
}

PsdReport psd_diagnostic(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen decomposition failed");
  PsdReport r;
  r.min_eig = es.eigenvalues().minCoeff();
  r.max_eig = es.eigenvalues().maxCoeff();
  r.psd = r.min_eig >= -1e-8 * std::max(std::abs(r.max_eig), 0.0);
  return r;
}

Eigen::MatrixXd induced_distance(const GramMatrix& g) {
  const auto& k = g.values;
  const Eigen::Index n = k.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (r < -1e-9) throw std::runtime_error("kernel not PSD on this set");
      d(i, j) = d(j, i) = std::sqrt(std::max(0.0, r));
    }
  }
  return d;
}

Eigen::MatrixXd euclidean_distances(const std::vector<Signal>& items) {
  const auto n = static_cast<Eigen::Index>(items.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = items[i];
      const auto& b = items[j];
      if (a.size() != b.size()) throw std::invalid_argument("euclidean distance: length mismatch");
      double s = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  }
  return d;
}

Eigen::MatrixXd pearson_distances(const std::vector<Signal>& items) {
  const auto n = static_cast<Eigen::Index>(items.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = 1.0 - pearson(items[i].samples(), items[j].samples());
    }
  }
  return d;
}

double distance_optimality(const Eigen::MatrixXd& D, bool literal) {
  const Eigen::Index n = D.rows();
  if (D.cols() != n) throw std::invalid_argument("distance_optimality: matrix is not square");
  if (n < 3) throw std::invalid_argument("distance_optimality: need at least 3 items");
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == i) continue;
      if (best < 0 || D(i, k) < D(i, best)) best = k;
    }
    // 1-based in the formula, but only differences matter
    const double diff = static_cast<double>(i - best);
    total += literal ? std::abs(diff - 1.0) : std::abs(diff) - 1.0;
  }
  const double denom = static_cast<double>(n - 2);
  return literal ? total / denom : total / (static_cast<double>(n) * denom);
}

}  // namespace mla
