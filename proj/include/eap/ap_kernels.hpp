#pragma once

#include <cstdint>
#include <vector>

#include "eap/matrix.hpp"

namespace eap {

/// Damped responsibility sweep shared by static AP and the EAP engine:
///   rho_ij <- lambda*rho_ij + (1-lambda)*(base_ij - max_{k!=j}(alpha_ik + base_ik))
/// where base is the similarity matrix for AP and s + delta + phi for EAP.
/// Only rows/columns with live[i] participate; pairs with base == -inf are
/// absent edges and are skipped both as outputs and as max candidates. Rows
/// with fewer than two candidates are left untouched (the single-node case is
/// resolved at exemplar identification). Returns the number of entries
/// written.
long responsibility_sweep(Matrix& rho, const Matrix& base, const Matrix& alpha,
                          const std::vector<std::uint8_t>& live,
                          double lambda);

/// Damped availability sweep:
///   alpha_jj <- sum_{k!=j} max(rho_kj, 0)
///   alpha_ij <- min(0, rho_jj + sum_{k not in {i,j}} max(rho_kj, 0)),  i != j
/// Edge presence follows `base` as in responsibility_sweep. Returns entries
/// written.
long availability_sweep(Matrix& alpha, const Matrix& rho, const Matrix& base,
                        const std::vector<std::uint8_t>& live, double lambda);

/// Four-branch temporal message (the shared closed form of the delta and phi
/// updates). v is rho + alpha minus the opposite temporal message at the
/// coupled time step; toward_consensus says whether the candidate column is a
/// live consensus node there. Requires gamma >= omega >= 0.
double temporal_message(double v, double gamma, double omega,
                        bool toward_consensus);

/// Which branch temporal_message takes: 0 = low saturation, 1 = linear,
/// 2 = (unreachable for gamma >= omega >= 0), 3 = high saturation.
int temporal_branch(double v, double gamma, double omega,
                    bool toward_consensus);

}  // namespace eap
