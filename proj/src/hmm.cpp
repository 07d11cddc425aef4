#include "mla/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mla/parallel.hpp"

namespace mla {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kVarFloor = 1e-6;

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// log(exp(a) + exp(b)) with -inf handled
double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

double Gaussian::log_pdf(double x) const {
  const double d = x - mu;
  return -0.5 * (std::log(2.0 * std::numbers::pi * sigma2) + d * d / sigma2);
}

Hmm::Hmm(std::vector<std::string> labels, std::vector<std::vector<double>> A,
         std::vector<double> pi, std::vector<Gaussian> emissions)
    : labels_(std::move(labels)), A_(std::move(A)), pi_(std::move(pi)),
      emissions_(std::move(emissions)) {
  validate();
  index();
}

void Hmm::validate() const {
  const std::size_t n = labels_.size();
  if (n == 0) throw std::invalid_argument("hmm: no states");
  if (A_.size() != n || pi_.size() != n || emissions_.size() != n) {
    throw std::invalid_argument("hmm: inconsistent sizes");
  }
  double ps = 0.0;
  for (double p : pi_) {
    if (!(p >= 0.0)) throw std::invalid_argument("hmm: negative initial probability");
    ps += p;
  }
  if (std::abs(ps - 1.0) > 1e-9) throw std::invalid_argument("hmm: pi does not sum to 1");
  for (const auto& row : A_) {
    if (row.size() != n) throw std::invalid_argument("hmm: A is not square");
    double s = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("hmm: negative transition probability");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("hmm: row of A does not sum to 1");
  }
  for (const auto& e : emissions_) {
    if (!(e.sigma2 > 0.0) || !std::isfinite(e.mu)) throw std::invalid_argument("hmm: bad emission");
  }
}

void Hmm::index() {
  const std::size_t n = size();
  pred_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (A_[i][j] > 0.0) pred_[j].push_back(i);
    }
  }
}

InitStats init_stats_from(const std::vector<double>& obs) {
  if (obs.size() < 2) throw std::invalid_argument("init_stats_from: need at least two values");
  std::vector<double> v(obs);
  std::sort(v.begin(), v.end());
  const std::size_t half = v.size() / 2;
  auto moments = [](auto b, auto e, double& mu, double& var) {
    const double n = static_cast<double>(e - b);
    mu = 0.0;
    for (auto it = b; it != e; ++it) mu += *it;
    mu /= n;
    var = 0.0;
    for (auto it = b; it != e; ++it) var += (*it - mu) * (*it - mu);
    var = std::max(var / n, kVarFloor);
  };
  InitStats s;
  moments(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(half), s.linker_mu, s.linker_var);
  moments(v.begin() + static_cast<std::ptrdiff_t>(half), v.end(), s.nucleosome_mu, s.nucleosome_var);
  return s;
}

Hmm build_nucleosome_topology(const InitStats& st) {
  constexpr std::size_t n = 18;
  std::vector<std::string> labels{"L"};
  for (int i = 1; i <= 8; ++i) labels.push_back("N" + std::to_string(i));
  for (int i = 1; i <= 9; ++i) labels.push_back("DN" + std::to_string(i));
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  const std::size_t L = 0, N1 = 1, DN1 = 9;
  A[L][L] = 0.8;
  A[L][N1] = 0.1;
  A[L][DN1] = 0.1;
  for (std::size_t i = 1; i <= 5; ++i) A[N1 + i - 1][N1 + i] = 1.0;  // N1..N5
  A[6][7] = 0.5;  // N6 -> N7 or L
  A[6][L] = 0.5;
  A[7][8] = 0.5;  // N7 -> N8 or L
  A[7][L] = 0.5;
  A[8][L] = 1.0;  // N8 -> L
  for (std::size_t i = 0; i < 8; ++i) A[DN1 + i][DN1 + i + 1] = 1.0;
  A[17][17] = 0.5;
  A[17][L] = 0.5;
  std::vector<double> pi(n, 0.0);
  pi[L] = 1.0;
  std::vector<Gaussian> em(n, Gaussian{st.nucleosome_mu, st.nucleosome_var});
  em[L] = Gaussian{st.linker_mu, st.linker_var};
  return Hmm(std::move(labels), std::move(A), std::move(pi), std::move(em));
}

bool is_nucleosome_state(const std::string& label) { return label != "L"; }

namespace {

std::vector<double> log_emissions(const Hmm& hmm, const std::vector<double>& obs) {
  const std::size_t N = hmm.size(), T = obs.size();
  std::vector<double> le(T * N);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) le[t * N + i] = hmm.emissions()[i].log_pdf(obs[t]);
  }
  return le;
}

std::vector<std::vector<double>> log_matrix(const std::vector<std::vector<double>>& A) {
  std::vector<std::vector<double>> out(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    out[i].resize(A[i].size());
    for (std::size_t j = 0; j < A[i].size(); ++j) out[i][j] = safe_log(A[i][j]);
  }
  return out;
}

// successors are needed for the backward pass
std::vector<std::vector<std::size_t>> successors(const Hmm& hmm) {
  std::vector<std::vector<std::size_t>> succ(hmm.size());
  for (std::size_t j = 0; j < hmm.size(); ++j) {
    for (std::size_t i : hmm.predecessors(j)) succ[i].push_back(j);
  }
  for (auto& s : succ) std::sort(s.begin(), s.end());
  return succ;
}

}  // namespace

HmmPosteriors forward_backward(const Hmm& hmm, const std::vector<double>& obs) {
  if (obs.empty()) throw std::invalid_argument("forward_backward: empty observation sequence");
  const std::size_t N = hmm.size(), T = obs.size();
  const auto le = log_emissions(hmm, obs);
  const auto lA = log_matrix(hmm.A());
  const auto succ = successors(hmm);
  HmmPosteriors post;
  post.T = T;
  post.N = N;
  post.log_alpha.assign(T * N, kNegInf);
  post.log_beta.assign(T * N, kNegInf);
  post.gamma.assign(T * N, 0.0);
  auto& a = post.log_alpha;
  auto& b = post.log_beta;
  for (std::size_t i = 0; i < N; ++i) a[i] = safe_log(hmm.pi()[i]) + le[i];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      double acc = kNegInf;
      for (std::size_t i : hmm.predecessors(j)) acc = log_add(acc, a[(t - 1) * N + i] + lA[i][j]);
      a[t * N + j] = acc == kNegInf ? kNegInf : acc + le[t * N + j];
    }
  }
  for (std::size_t i = 0; i < N; ++i) b[(T - 1) * N + i] = 0.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = kNegInf;
      for (std::size_t j : succ[i]) acc = log_add(acc, lA[i][j] + le[(t + 1) * N + j] + b[(t + 1) * N + j]);
      b[t * N + i] = acc;
    }
  }
  double ll = kNegInf;
  for (std::size_t i = 0; i < N; ++i) ll = log_add(ll, a[(T - 1) * N + i]);
  post.log_likelihood = ll;
  if (ll == kNegInf) return post;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const double v = a[t * N + i] + b[t * N + i];
      post.gamma[t * N + i] = v == kNegInf ? 0.0 : std::exp(v - ll);
    }
  }
  return post;
}

double log_likelihood(const Hmm& hmm, const std::vector<double>& obs) {
  return forward_backward(hmm, obs).log_likelihood;
}

ViterbiResult viterbi(const Hmm& hmm, const std::vector<double>& obs) {
  if (obs.empty()) throw std::invalid_argument("viterbi: empty observation sequence");
  const std::size_t N = hmm.size(), T = obs.size();
  const auto le = log_emissions(hmm, obs);
  const auto lA = log_matrix(hmm.A());
  std::vector<double> delta(T * N, kNegInf);
  std::vector<std::size_t> back(T * N, 0);
  for (std::size_t i = 0; i < N; ++i) delta[i] = safe_log(hmm.pi()[i]) + le[i];
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      double best = kNegInf;
      std::size_t arg = hmm.predecessors(j).empty() ? 0 : hmm.predecessors(j).front();
      for (std::size_t i : hmm.predecessors(j)) {  // ascending, strict > keeps lowest index
        const double v = delta[(t - 1) * N + i] + lA[i][j];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      delta[t * N + j] = best == kNegInf ? kNegInf : best + le[t * N + j];
      back[t * N + j] = arg;
    }
  }
  ViterbiResult res;
  res.path.resize(T);
  double best = kNegInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < N; ++i) {
    if (delta[(T - 1) * N + i] > best) {
      best = delta[(T - 1) * N + i];
      arg = i;
    }
  }
  res.log_prob = best;
  res.path[T - 1] = arg;
  for (std::size_t t = T - 1; t > 0; --t) res.path[t - 1] = back[t * N + res.path[t]];
  res.labels.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    res.labels[t] = is_nucleosome_state(hmm.labels()[res.path[t]]) ? 1 : 0;
  }
  return res;
}

namespace {

struct Counts {
  double ll = 0.0;
  std::vector<double> pi;
  std::vector<std::vector<double>> xi;  // expected transitions
  std::vector<double> w, wx, wxx;       // posterior-weighted moments

  explicit Counts(std::size_t n)
      : pi(n, 0.0), xi(n, std::vector<double>(n, 0.0)), w(n, 0.0), wx(n, 0.0), wxx(n, 0.0) {}
};

Counts expected_counts(const Hmm& hmm, const std::vector<double>& obs, double shift) {
  const std::size_t N = hmm.size(), T = obs.size();
  Counts c(N);
  const auto post = forward_backward(hmm, obs);
  c.ll = post.log_likelihood;
  if (c.ll == -std::numeric_limits<double>::infinity()) return c;
  const auto le = log_emissions(hmm, obs);
  const auto lA = log_matrix(hmm.A());
  for (std::size_t i = 0; i < N; ++i) c.pi[i] = post.g(0, i);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const double g = post.g(t, i);
      c.w[i] += g;
      const double x = obs[t] - shift;
      c.wx[i] += g * x;
      c.wxx[i] += g * x * x;
    }
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    for (std::size_t j = 0; j < N; ++j) {
      const double tail = le[(t + 1) * N + j] + post.lb(t + 1, j) - c.ll;
      for (std::size_t i : hmm.predecessors(j)) {
        const double v = post.la(t, i) + lA[i][j] + tail;
        if (v != -std::numeric_limits<double>::infinity()) c.xi[i][j] += std::exp(v);
      }
    }
  }
  return c;
}

}  // namespace

TrainResult baum_welch(const Hmm& init, const std::vector<std::vector<double>>& obs_list,
                       int max_iters, double tol) {
  if (obs_list.empty()) throw std::invalid_argument("baum_welch: no observation sequences");
  for (const auto& o : obs_list) {
    if (o.empty()) throw std::invalid_argument("baum_welch: empty observation sequence");
  }
  const std::size_t N = init.size();
  TrainResult res;
  res.model = init;
  // moments are accumulated around the data mean to limit cancellation
  double shift = 0.0;
  std::size_t count = 0;
  for (const auto& o : obs_list) {
    for (double x : o) shift += x;
    count += o.size();
  }
  shift /= static_cast<double>(count);
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    std::vector<Counts> parts(obs_list.size(), Counts(N));
    parallel_for(obs_list.size(), [&](std::size_t s) { parts[s] = expected_counts(res.model, obs_list[s], shift); });
    Counts tot(N);
    for (const auto& p : parts) {  // fixed reduction order
      tot.ll += p.ll;
      for (std::size_t i = 0; i < N; ++i) {
        tot.pi[i] += p.pi[i];
        tot.w[i] += p.w[i];
        tot.wx[i] += p.wx[i];
        tot.wxx[i] += p.wxx[i];
        for (std::size_t j = 0; j < N; ++j) tot.xi[i][j] += p.xi[i][j];
      }
    }
    res.trace.push_back(tot.ll);
    const bool converged =
        it > 0 && std::isfinite(prev) && tot.ll - prev < tol;
    if (converged || it >= max_iters || !std::isfinite(tot.ll)) break;
    prev = tot.ll;

    auto A = res.model.A();
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += tot.xi[i][j];
      if (s <= 0.0) continue;  // state never left: keep its row
      for (std::size_t j = 0; j < N; ++j) A[i][j] = tot.xi[i][j] / s;
    }
    std::vector<double> pi(N);
    const double ps = static_cast<double>(obs_list.size());
    for (std::size_t i = 0; i < N; ++i) pi[i] = tot.pi[i] / ps;
    auto em = res.model.emissions();
    for (std::size_t i = 0; i < N; ++i) {
      if (tot.w[i] <= 1e-300) continue;
      const double m1 = tot.wx[i] / tot.w[i];
      const double mu = shift + m1;
      double var = tot.wxx[i] / tot.w[i] - m1 * m1;
      if (var < kVarFloor) {
        var = kVarFloor;
        res.variance_floored = true;
      }
      em[i] = Gaussian{mu, var};
    }
    // renormalize away rounding drift so validate() keeps passing
    for (auto& row : A) {
      double s = 0.0;
      for (double p : row) s += p;
      for (double& p : row) p /= s;
    }
    double s = 0.0;
    for (double p : pi) s += p;
    for (double& p : pi) p /= s;
    res.model = Hmm(res.model.labels(), std::move(A), std::move(pi), std::move(em));
    res.iterations = it + 1;
  }
  return res;
}

}  // namespace mla
