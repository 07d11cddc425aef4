#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mla/signal.hpp"

namespace mla {

struct Gaussian {
  double mu = 0.0;
  double sigma2 = 1.0;
  double log_pdf(double x) const;
};

class Hmm {
 public:
  Hmm() = default;
  Hmm(std::vector<std::string> labels, std::vector<std::vector<double>> A,
      std::vector<double> pi, std::vector<Gaussian> emissions);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<double>>& A() const { return A_; }
  const std::vector<double>& pi() const { return pi_; }
  const std::vector<Gaussian>& emissions() const { return emissions_; }

  /// Predecessors of state j with nonzero transition probability.
  const std::vector<std::size_t>& predecessors(std::size_t j) const { return pred_[j]; }

  /// Checks stochasticity and variances; throws std::invalid_argument.
  void validate() const;

 private:
  void index();

  std::vector<std::string> labels_;
  std::vector<std::vector<double>> A_;
  std::vector<double> pi_;
  std::vector<Gaussian> emissions_;
  std::vector<std::vector<std::size_t>> pred_;
};

struct InitStats {
  double linker_mu = 0.0;
  double linker_var = 1.0;
  double nucleosome_mu = 1.0;
  double nucleosome_var = 1.0;
};

/// Linker / nucleosome moments from the values below and above the median.
InitStats init_stats_from(const std::vector<double>& obs);

/// 18 states: L, N1..N8 (dwell 6..8), DN1..DN9 (dwell >= 9).
Hmm build_nucleosome_topology(const InitStats& stats);

/// True for states that count as nucleosome when decoding.
bool is_nucleosome_state(const std::string& label);

struct HmmPosteriors {
  double log_likelihood = 0.0;
  std::size_t T = 0, N = 0;
  std::vector<double> log_alpha;  // T x N, row-major
  std::vector<double> log_beta;   // T x N
  std::vector<double> gamma;      // T x N, normalized posteriors

  double la(std::size_t t, std::size_t i) const { return log_alpha[t * N + i]; }
  double lb(std::size_t t, std::size_t i) const { return log_beta[t * N + i]; }
  double g(std::size_t t, std::size_t i) const { return gamma[t * N + i]; }
};

HmmPosteriors forward_backward(const Hmm& hmm, const std::vector<double>& obs);
double log_likelihood(const Hmm& hmm, const std::vector<double>& obs);

struct ViterbiResult {
  std::vector<std::size_t> path;  // 0-based state indices
  std::vector<std::uint8_t> labels;  // 1 = nucleosome, 0 = linker
  double log_prob = 0.0;
};

ViterbiResult viterbi(const Hmm& hmm, const std::vector<double>& obs);

struct TrainResult {
  Hmm model;
  std::vector<double> trace;  // total log-likelihood before each update, plus final
  int iterations = 0;
  bool variance_floored = false;
};

/// Stops once an iteration gains less than tol in total log-likelihood.
TrainResult baum_welch(const Hmm& init, const std::vector<std::vector<double>>& obs_list,
                       int max_iters = 100, double tol = 1e-6);

}  // namespace mla
