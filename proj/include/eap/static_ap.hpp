#pragma once

#include <cstdint>
#include <vector>

#include "eap/matrix.hpp"

namespace eap {

/// Responsibility/availability state for one static AP run.
struct ApMessages {
  Matrix rho;
  Matrix alpha;
  double lambda = 0.9;

  explicit ApMessages(int n, double lambda_ = 0.9)
      : rho(n, 0.0), alpha(n, 0.0), lambda(lambda_) {}
};

struct ApConfig {
  double lambda = 0.9;
  int max_iter = 500;
  int conv_window = 20;  // iterations with an unchanged exemplar set
};

struct ApResult {
  std::vector<int> exemplar;      // per point; -1 for indices not in `live`
  std::vector<int> exemplar_set;  // sorted
  int iterations = 0;
  bool converged = false;
};

/// One damped responsibility update over the whole matrix.
void update_responsibilities(ApMessages& msgs, const Matrix& s,
                             const std::vector<std::uint8_t>& live);

/// One damped availability update over the whole matrix.
void update_availabilities(ApMessages& msgs, const Matrix& s,
                           const std::vector<std::uint8_t>& live);

/// Classic affinity propagation on one similarity matrix (preferences on the
/// diagonal). `live` restricts the run to a subset of indices; pass nullptr
/// for all. Alternates the two updates until the exemplar set is unchanged
/// for conv_window iterations or max_iter is reached, then assigns each point
/// to argmax_{j in E}(rho_ij + alpha_ij) with exemplars self-assigned.
/// Throws NoExemplar when the final exemplar set is empty.
ApResult run_ap(const Matrix& s, const ApConfig& cfg,
                const std::vector<std::uint8_t>* live = nullptr);

}  // namespace eap
