#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eap/dataset.hpp"
#include "eap/matrix.hpp"

namespace eap {

/// Per-time activity bookkeeping for points absent over part of the horizon.
/// insertions[t] = points active at t but not t-1 (t >= 2); deletions[t] =
/// points active at t but not t+1 (t <= T-1). Indices are 0-based.
struct ActivitySets {
  std::vector<std::vector<int>> active;     // V[t]
  std::vector<std::vector<int>> both_prev;  // B[t]: active at t and t-1
  std::vector<std::vector<int>> both_next;  // D[t]: active at t and t+1
  std::vector<std::vector<int>> insertions;
  std::vector<std::vector<int>> deletions;

  static ActivitySets derive(const DatasetSeries& ds);

  bool any_insertions() const;
  bool any_deletions() const;
};

/// First-iteration neighbor of an inserted point: similarity argmax over the
/// candidate set (ties to the lowest index). nullopt when there are no
/// candidates; the caller falls back to zero-initialized messages.
std::optional<int> nn_by_similarity(const Matrix& sim, int point,
                                    const std::vector<int>& candidates);

/// Neighbor by message distance: the candidate whose row of the message-sum
/// matrix alpha+rho+delta+phi, restricted to `columns`, is Euclidean-nearest
/// to the point's row.
std::optional<int> nn_by_messages(const Matrix& alpha, const Matrix& rho,
                                  const Matrix& delta, const Matrix& phi,
                                  int point, const std::vector<int>& candidates,
                                  const std::vector<int>& columns);

/// Copy src's row and column of one message matrix onto dst (dst's diagonal
/// entry takes src's diagonal), touching only live indices.
void copy_message_rows(Matrix& m, int dst, int src,
                       const std::vector<std::uint8_t>& live);

}  // namespace eap
