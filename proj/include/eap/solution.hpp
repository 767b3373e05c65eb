#pragma once

#include <string>
#include <vector>

namespace eap {

/// One cluster identity stable across a contiguous span of time. Consensus
/// tracks carry the node's per-time feature vectors; data-exemplar tracks are
/// clusters whose exemplar is a raw data point (small clusters below the
/// consensus threshold, or any cluster when consensus is disabled).
struct Track {
  std::string id;
  bool is_consensus = false;
  int birth_t = 0;  // 1-based, inclusive
  int death_t = 0;  // 1-based, inclusive (== T when the track survives)
  std::string parent_exemplar;          // consensus only
  std::vector<std::vector<double>> features;  // consensus only, one per span t
};

/// Final output of a clustering run: per-time exemplar assignment for each
/// point plus stable track labels.
struct ClusteringSolution {
  std::vector<std::string> point_ids;
  int time_steps = 0;

  // [t][i]: label of the exemplar node serving point i at t ("" if inactive).
  // Exemplar labels are point ids for data exemplars and "c<k>" for consensus
  // nodes, so identical labels across t mean the same physical node.
  std::vector<std::vector<std::string>> exemplar_label;
  // [t][i]: index into tracks, -1 if inactive.
  std::vector<std::vector<int>> track_of_point;

  std::vector<Track> tracks;
  int iterations = 0;
  bool converged = false;

  bool active(int t, int i) const { return track_of_point[t][i] >= 0; }

  /// Cluster labels at t (track indices) for points active at t, together
  /// with the point indices they belong to.
  void labels_at(int t, std::vector<int>* point_indices,
                 std::vector<int>* labels) const;
};

}  // namespace eap
