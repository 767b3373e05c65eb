#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace eap {

/// Dense square matrix of doubles.
///
/// Carries an optional access audit: while armed, every element access whose
/// row or column is not set in the registered mask increments a violation
/// counter. The engine arms this in instrumented runs to prove that messages
/// of inactive (point, t) pairs are never read or written.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

  int dim() const { return n_; }

  double& operator()(int i, int j) {
    audit(i, j);
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }
  double operator()(int i, int j) const {
    audit(i, j);
    return data_[static_cast<std::size_t>(i) * n_ + j];
  }

  /// Grow to m x m keeping existing entries; new entries take `fill`.
  void grow(int m, double fill = 0.0) {
    assert(m >= n_);
    if (m == n_) return;
    std::vector<double> next(static_cast<std::size_t>(m) * m, fill);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        next[static_cast<std::size_t>(i) * m + j] =
            data_[static_cast<std::size_t>(i) * n_ + j];
    data_ = std::move(next);
    n_ = m;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  void arm_audit(const std::vector<std::uint8_t>* mask, long* violations) {
    audit_mask_ = mask;
    audit_violations_ = violations;
  }

  bool operator==(const Matrix& o) const {
    return n_ == o.n_ && data_ == o.data_;
  }

 private:
  void audit(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    if (audit_mask_ && (!(*audit_mask_)[i] || !(*audit_mask_)[j]))
      ++*audit_violations_;
  }

  int n_ = 0;
  std::vector<double> data_;
  const std::vector<std::uint8_t>* audit_mask_ = nullptr;
  long* audit_violations_ = nullptr;
};

}  // namespace eap
