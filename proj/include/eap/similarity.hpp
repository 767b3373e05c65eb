#pragma once

#include <utility>
#include <vector>

#include "eap/dataset.hpp"
#include "eap/matrix.hpp"

namespace eap {

enum class PreferenceMode { PerTimeMin, GlobalMin, Constant };

/// T per-time pairwise similarity matrices over data points, preferences on
/// the diagonal. Absent pairs (inactive points, or pairs not listed in sparse
/// mode) are -inf and act as such in every maximization; the diagonal is NaN
/// until set_preferences runs.
class SimilarityTensor {
 public:
  SimilarityTensor() = default;
  SimilarityTensor(int time_steps, int n_points);

  int time_steps() const { return static_cast<int>(mats_.size()); }
  int n_points() const { return mats_.empty() ? 0 : mats_[0].dim(); }

  double s(int t, int i, int j) const { return mats_[t](i, j); }
  double& s(int t, int i, int j) { return mats_[t](i, j); }
  const Matrix& at(int t) const { return mats_[t]; }

  bool preferences_set() const { return preferences_set_; }
  void note_preferences_set() { preferences_set_ = true; }

 private:
  std::vector<Matrix> mats_;
  bool preferences_set_ = false;
};

/// s[t][i][j] = -||x_i^t - x_j^t||^2 for active pairs; symmetric.
SimilarityTensor build_similarity(const DatasetSeries& ds);

/// Sparse mode: only the listed (i, j) pairs (plus their mirrors) get a
/// similarity; everything else stays -inf and is skipped in maximizations.
SimilarityTensor build_similarity_sparse(
    const DatasetSeries& ds,
    const std::vector<std::vector<std::pair<int, int>>>& pairs);

/// Fill the diagonal. PerTimeMin uses the minimum off-diagonal similarity at
/// each t, GlobalMin the minimum over all t, Constant the given value.
void set_preferences(SimilarityTensor& sim, const DatasetSeries& ds,
                     PreferenceMode mode, double constant = 0.0);

}  // namespace eap
