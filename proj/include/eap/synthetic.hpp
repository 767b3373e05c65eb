#pragma once

#include <cstdint>
#include <string>

#include "eap/dataset.hpp"

namespace eap {

/// The four Gaussian benchmark recipes. All are 2-D with 200 points by
/// default, fresh draws at every step, and ground-truth labels attached.
enum class GaussianKind { Separated, Colliding, ClusterChange, ThirdCluster };

struct GaussianScenario {
  GaussianKind kind = GaussianKind::Separated;
  int n_points = 200;
  int time_steps = 0;  // 0 = scenario default (40 for separated, else 25)
  std::uint64_t seed = 1;
};

DatasetSeries gen_gaussian(const GaussianScenario& sc);

/// Two well-separated components over 40 steps: means [-4,0] and [4,0],
/// covariance 0.1*I, each component's first mean coordinate random-walking
/// +-0.1 per step, covariance widening to 0.3*I from t=19.
DatasetSeries gen_separated(std::uint64_t seed, int n_points = 200);

/// Colliding components over 25 steps: means [-3,-3] and [3,3], identity
/// covariance; the first mean moves by [0.4,0.4] at t=2..9, static after.
DatasetSeries gen_colliding(std::uint64_t seed, int n_points = 200);

/// As colliding, but second-component points defect to the first component
/// with probability 0.25 at t=10 and t=11; membership frozen from t=12.
DatasetSeries gen_cluster_change(std::uint64_t seed, int n_points = 200);

/// As colliding, but the defectors at t=10,11 form a new third component at
/// [-3,-3] with identity covariance.
DatasetSeries gen_third_cluster(std::uint64_t seed, int n_points = 200);

/// Per-feature zero-mean/unit-std normalization over the whole horizon.
/// Intentionally a separate implementation from normalize_global; the tests
/// cross-check the two.
DatasetSeries normalize_synthetic(const DatasetSeries& ds);

GaussianKind gaussian_kind_from_name(const std::string& name);
std::string gaussian_kind_name(GaussianKind kind);

}  // namespace eap
