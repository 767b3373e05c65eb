#include "eap/activity.hpp"

#include <cmath>
#include <limits>

namespace eap {

ActivitySets ActivitySets::derive(const DatasetSeries& ds) {
  const int T = ds.time_steps();
  const int n = ds.n_points();
  ActivitySets as;
  as.active.assign(T, {});
  as.both_prev.assign(T, {});
  as.both_next.assign(T, {});
  as.insertions.assign(T, {});
  as.deletions.assign(T, {});
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i) {
      if (!ds.active(t, i)) continue;
      as.active[t].push_back(i);
      if (t > 0) {
        if (ds.active(t - 1, i))
          as.both_prev[t].push_back(i);
        else
          as.insertions[t].push_back(i);
      }
      if (t + 1 < T) {
        if (ds.active(t + 1, i))
          as.both_next[t].push_back(i);
        else
          as.deletions[t].push_back(i);
      }
    }
  return as;
}

bool ActivitySets::any_insertions() const {
  for (const auto& v : insertions)
    if (!v.empty()) return true;
  return false;
}

bool ActivitySets::any_deletions() const {
  for (const auto& v : deletions)
    if (!v.empty()) return true;
  return false;
}

std::optional<int> nn_by_similarity(const Matrix& sim, int point,
                                    const std::vector<int>& candidates) {
  double best = -std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int j : candidates) {
    if (j == point) continue;
    double v = sim(point, j);
    if (v > best) {
      best = v;
      arg = j;
    }
  }
  if (arg < 0 || best == -std::numeric_limits<double>::infinity())
    return std::nullopt;
  return arg;
}

std::optional<int> nn_by_messages(const Matrix& alpha, const Matrix& rho,
                                  const Matrix& delta, const Matrix& phi,
                                  int point, const std::vector<int>& candidates,
                                  const std::vector<int>& columns) {
  if (columns.empty()) return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int j : candidates) {
    if (j == point) continue;
    double acc = 0.0;
    for (int c : columns) {
      double d = (alpha(point, c) + rho(point, c) + delta(point, c) +
                  phi(point, c)) -
                 (alpha(j, c) + rho(j, c) + delta(j, c) + phi(j, c));
      acc += d * d;
    }
    if (acc < best) {
      best = acc;
      arg = j;
    }
  }
  if (arg < 0) return std::nullopt;
  return arg;
}

void copy_message_rows(Matrix& m, int dst, int src,
                       const std::vector<std::uint8_t>& live) {
  const int n = m.dim();
  for (int j = 0; j < n; ++j) {
    if (!live[j] || j == dst) continue;
    m(dst, j) = m(src, j);
    m(j, dst) = m(j, src);
  }
  m(dst, dst) = m(src, src);
}

}  // namespace eap
