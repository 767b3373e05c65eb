#pragma once

#include <optional>
#include <string>
#include <vector>

namespace eap {

/// Column mapping for the CSV schema. Feature columns are every header column
/// not claimed by id/time/label, in file order.
struct CsvSchema {
  std::string id_column = "id";
  std::string time_column = "t";
  std::string label_column = "label";  // used only if present in the header
};

/// Per-time feature vectors and activity flags for N named points over T
/// steps. A point is active at t iff it has a feature vector there; missing
/// cells inside an active row are imputed at load time and flagged.
class DatasetSeries {
 public:
  DatasetSeries() = default;
  DatasetSeries(std::vector<std::string> point_ids, int time_steps,
                int feature_dim);

  int n_points() const { return static_cast<int>(point_ids_.size()); }
  int time_steps() const { return time_steps_; }
  int feature_dim() const { return feature_dim_; }
  const std::vector<std::string>& point_ids() const { return point_ids_; }
  int point_index(const std::string& id) const;  // -1 if unknown

  bool active(int t, int i) const { return active_[t][i] != 0; }
  const double* features(int t, int i) const {
    return &features_[t][static_cast<std::size_t>(i) * feature_dim_];
  }
  double feature(int t, int i, int f) const {
    return features_[t][static_cast<std::size_t>(i) * feature_dim_ + f];
  }

  bool has_label(int t, int i) const;
  int label(int t, int i) const { return labels_[t][i]; }

  bool imputed_cell(int t, int i, int f) const {
    return imputed_[t][static_cast<std::size_t>(i) * feature_dim_ + f] != 0;
  }
  bool imputed_any(int t, int i) const;

  void set_point(int t, int i, const std::vector<double>& values,
                 std::optional<int> label = std::nullopt);
  void set_inactive(int t, int i);
  void mark_imputed(int t, int i, int f);

  /// Enforces the container invariants: uniform feature dimension is
  /// structural; this checks that every point is active somewhere.
  void validate() const;

  bool operator==(const DatasetSeries& o) const;

 private:
  std::vector<std::string> point_ids_;
  int time_steps_ = 0;
  int feature_dim_ = 0;
  // [t] -> N*F values (NaN when inactive), N activity flags, N labels.
  std::vector<std::vector<double>> features_;
  std::vector<std::vector<std::uint8_t>> active_;
  std::vector<std::vector<int>> labels_;  // kNoLabel when absent
  std::vector<std::vector<std::uint8_t>> imputed_;

  static constexpr int kNoLabel = INT32_MIN;
};

/// Load rows (point_id, t, f_1..f_F[, label]) with t in 1..T. Activity is
/// inferred from row presence; empty feature cells inside a present row are
/// imputed from the point's last known value (first known value if none
/// precedes) and flagged.
DatasetSeries load_csv(const std::string& path, const CsvSchema& schema = {});

/// Inverse of load_csv. Rows are grouped by point in first-appearance order
/// so that a reload reproduces the point ordering; imputed cells are written
/// back as empty fields so the round trip preserves imputation flags.
void save_csv(const DatasetSeries& ds, const std::string& path,
              const CsvSchema& schema = {});

/// Shift/scale each feature dimension to zero mean and unit (population)
/// standard deviation over all active (t, i) entries.
DatasetSeries normalize_global(const DatasetSeries& ds);

/// Consecutive differences within fixed windows of `window` raw steps, each
/// diff vector normalized to zero mean / unit population std. Output has one
/// time step per full window and feature dimension window-1. Input must be
/// scalar series (F = 1).
DatasetSeries piecewise_normalized_derivative(const DatasetSeries& ds,
                                              int window);

}  // namespace eap
