#pragma once

#include <vector>

#include "eap/dataset.hpp"
#include "eap/solution.hpp"

namespace eap {

/// Fraction of point pairs on which the two labelings agree (same cluster in
/// both, or different clusters in both). Requires n >= 2.
double rand_index(const std::vector<int>& truth, const std::vector<int>& pred);

/// Half-weighted sum of same-pair precision and different-pair precision:
/// correctly-together pairs over 2x predicted-together pairs, plus
/// correctly-apart pairs over 2x predicted-apart pairs. Requires the
/// prediction to have at least one same-cluster and one different-cluster
/// pair.
double modified_rand(const std::vector<int>& truth,
                     const std::vector<int>& pred);

struct TrackStats {
  std::vector<int> clusters_per_t;
  int distinct_exemplars_total = 0;
  double mean_clusters = 0.0;
  // [t-1] for t = 2..T: fraction of points active at t-1 and t whose track
  // changed.
  std::vector<double> membership_change_rate;
  std::vector<int> birth_times;  // 1-based; tracks born after t=1
  std::vector<int> death_times;  // 1-based; first step a track is gone
};

TrackStats track_stats(const ClusteringSolution& sol);

/// Track stats plus per-time accuracy against the dataset's ground-truth
/// labels. Entries are NaN where the metric is undefined (no labels, fewer
/// than two labeled points, or a degenerate modified-Rand denominator).
/// Points inactive or unlabeled at t are excluded; with exclude_imputed the
/// points flagged as imputed at t are excluded as well.
struct SolutionMetrics {
  TrackStats tracks;
  std::vector<double> rand_per_t;
  std::vector<double> mod_rand_per_t;
  double mean_rand = 0.0;
  double mean_mod_rand = 0.0;
  bool has_truth = false;
};

SolutionMetrics evaluate_solution(const ClusteringSolution& sol,
                                  const DatasetSeries& ds,
                                  bool exclude_imputed = false);

}  // namespace eap
