#include "eap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "eap/errors.hpp"

namespace eap {

namespace {

// Contingency counts between two labelings. Pair counts are derived from the
// table; the O(n^2) pair loop lives in the tests as the independent oracle.
struct PairCounts {
  double same_same = 0;   // same cluster in truth and in pred
  double pred_same = 0;   // same cluster in pred
  double truth_same = 0;  // same cluster in truth
  double total = 0;       // C(n, 2)
};

PairCounts count_pairs(const std::vector<int>& truth,
                       const std::vector<int>& pred) {
  const std::size_t n = truth.size();
  std::map<std::pair<int, int>, long> cell;
  std::map<int, long> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    ++cell[{truth[i], pred[i]}];
    ++row[truth[i]];
    ++col[pred[i]];
  }
  auto choose2 = [](long m) { return 0.5 * m * (m - 1); };
  PairCounts pc;
  pc.total = choose2(static_cast<long>(n));
  for (auto& [k, m] : cell) pc.same_same += choose2(m);
  for (auto& [k, m] : row) pc.truth_same += choose2(m);
  for (auto& [k, m] : col) pc.pred_same += choose2(m);
  return pc;
}

void check_sizes(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size())
    fail(ErrorKind::UndefinedMetric, "labelings differ in length");
  if (truth.size() < 2)
    fail(ErrorKind::UndefinedMetric,
         "metric undefined for fewer than 2 points");
}

}  // namespace

double rand_index(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_sizes(truth, pred);
  PairCounts pc = count_pairs(truth, pred);
  double both_diff =
      pc.total - pc.truth_same - pc.pred_same + pc.same_same;
  return (pc.same_same + both_diff) / pc.total;
}

double modified_rand(const std::vector<int>& truth,
                     const std::vector<int>& pred) {
  check_sizes(truth, pred);
  PairCounts pc = count_pairs(truth, pred);
  if (pc.pred_same == 0)
    fail(ErrorKind::UndefinedMetric,
         "modified Rand undefined: prediction has no same-cluster pair");
  if (pc.pred_same == pc.total)
    fail(ErrorKind::UndefinedMetric,
         "modified Rand undefined: prediction has no different-cluster pair");
  double both_diff =
      pc.total - pc.truth_same - pc.pred_same + pc.same_same;
  return pc.same_same / (2.0 * pc.pred_same) +
         both_diff / (2.0 * (pc.total - pc.pred_same));
}

void ClusteringSolution::labels_at(int t, std::vector<int>* point_indices,
                                   std::vector<int>* labels) const {
  point_indices->clear();
  labels->clear();
  for (int i = 0; i < static_cast<int>(point_ids.size()); ++i) {
    if (track_of_point[t][i] < 0) continue;
    point_indices->push_back(i);
    labels->push_back(track_of_point[t][i]);
  }
}

TrackStats track_stats(const ClusteringSolution& sol) {
  TrackStats st;
  const int T = sol.time_steps;
  const int n = static_cast<int>(sol.point_ids.size());

  std::set<std::string> distinct;
  st.clusters_per_t.assign(T, 0);
  for (int t = 0; t < T; ++t) {
    std::set<std::string> at_t;
    for (int i = 0; i < n; ++i)
      if (sol.active(t, i)) {
        at_t.insert(sol.exemplar_label[t][i]);
        distinct.insert(sol.exemplar_label[t][i]);
      }
    st.clusters_per_t[t] = static_cast<int>(at_t.size());
  }
  st.distinct_exemplars_total = static_cast<int>(distinct.size());
  double acc = 0.0;
  for (int c : st.clusters_per_t) acc += c;
  st.mean_clusters = T > 0 ? acc / T : 0.0;

  st.membership_change_rate.assign(T > 1 ? T - 1 : 0, 0.0);
  for (int t = 1; t < T; ++t) {
    int both = 0, changed = 0;
    for (int i = 0; i < n; ++i) {
      if (!sol.active(t - 1, i) || !sol.active(t, i)) continue;
      ++both;
      if (sol.track_of_point[t - 1][i] != sol.track_of_point[t][i]) ++changed;
    }
    st.membership_change_rate[t - 1] =
        both > 0 ? static_cast<double>(changed) / both : 0.0;
  }

  for (const Track& tr : sol.tracks) {
    if (tr.birth_t > 1) st.birth_times.push_back(tr.birth_t);
    if (tr.death_t < T) st.death_times.push_back(tr.death_t + 1);
  }
  std::sort(st.birth_times.begin(), st.birth_times.end());
  std::sort(st.death_times.begin(), st.death_times.end());
  return st;
}

SolutionMetrics evaluate_solution(const ClusteringSolution& sol,
                                  const DatasetSeries& ds,
                                  bool exclude_imputed) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  SolutionMetrics m;
  m.tracks = track_stats(sol);
  m.rand_per_t.assign(sol.time_steps, nan);
  m.mod_rand_per_t.assign(sol.time_steps, nan);

  for (int t = 0; t < sol.time_steps; ++t) {
    std::vector<int> truth, pred;
    for (int i = 0; i < static_cast<int>(sol.point_ids.size()); ++i) {
      if (!sol.active(t, i) || !ds.has_label(t, i)) continue;
      if (exclude_imputed && ds.imputed_any(t, i)) continue;
      truth.push_back(ds.label(t, i));
      pred.push_back(sol.track_of_point[t][i]);
    }
    if (truth.size() < 2) continue;
    m.has_truth = true;
    m.rand_per_t[t] = rand_index(truth, pred);
    try {
      m.mod_rand_per_t[t] = modified_rand(truth, pred);
    } catch (const Error&) {
      // degenerate prediction at this t; leave NaN
    }
  }

  auto mean_defined = [&](const std::vector<double>& v) {
    double acc = 0.0;
    int cnt = 0;
    for (double x : v)
      if (!std::isnan(x)) {
        acc += x;
        ++cnt;
      }
    return cnt > 0 ? acc / cnt : nan;
  };
  m.mean_rand = mean_defined(m.rand_per_t);
  m.mean_mod_rand = mean_defined(m.mod_rand_per_t);
  return m;
}

}  // namespace eap
