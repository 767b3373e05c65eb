#include "eap/similarity.hpp"

#include <cmath>
#include <limits>

#include "eap/errors.hpp"

namespace eap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double neg_sq_dist(const DatasetSeries& ds, int t, int i, int j) {
  double acc = 0.0;
  for (int f = 0; f < ds.feature_dim(); ++f) {
    double d = ds.feature(t, i, f) - ds.feature(t, j, f);
    acc += d * d;
  }
  return -acc;
}
}  // namespace

SimilarityTensor::SimilarityTensor(int time_steps, int n_points) {
  mats_.assign(time_steps, Matrix(n_points, -kInf));
  for (int t = 0; t < time_steps; ++t)
    for (int i = 0; i < n_points; ++i)
      mats_[t](i, i) = std::numeric_limits<double>::quiet_NaN();
}

SimilarityTensor build_similarity(const DatasetSeries& ds) {
  SimilarityTensor sim(ds.time_steps(), ds.n_points());
  for (int t = 0; t < ds.time_steps(); ++t)
    for (int i = 0; i < ds.n_points(); ++i) {
      if (!ds.active(t, i)) continue;
      for (int j = i + 1; j < ds.n_points(); ++j) {
        if (!ds.active(t, j)) continue;
        double v = neg_sq_dist(ds, t, i, j);
        sim.s(t, i, j) = v;
        sim.s(t, j, i) = v;
      }
    }
  return sim;
}

SimilarityTensor build_similarity_sparse(
    const DatasetSeries& ds,
    const std::vector<std::vector<std::pair<int, int>>>& pairs) {
  if (static_cast<int>(pairs.size()) != ds.time_steps())
    fail(ErrorKind::Schema, "pair lists must cover every time step");
  SimilarityTensor sim(ds.time_steps(), ds.n_points());
  for (int t = 0; t < ds.time_steps(); ++t)
    for (auto [i, j] : pairs[t]) {
      if (i == j) continue;
      if (!ds.active(t, i) || !ds.active(t, j)) continue;
      double v = neg_sq_dist(ds, t, i, j);
      sim.s(t, i, j) = v;
      sim.s(t, j, i) = v;
    }
  return sim;
}

void set_preferences(SimilarityTensor& sim, const DatasetSeries& ds,
                     PreferenceMode mode, double constant) {
  const int T = sim.time_steps();
  const int n = sim.n_points();
  std::vector<double> per_time(T, kInf);
  if (mode != PreferenceMode::Constant) {
    for (int t = 0; t < T; ++t) {
      bool found = false;
      for (int i = 0; i < n; ++i) {
        if (!ds.active(t, i)) continue;
        for (int j = 0; j < n; ++j) {
          if (j == i || !ds.active(t, j)) continue;
          double v = sim.s(t, i, j);
          if (std::isfinite(v) && (!found || v < per_time[t])) {
            per_time[t] = v;
            found = true;
          }
        }
      }
      if (!found)
        fail(ErrorKind::UndefinedMinimum,
             "no off-diagonal similarity at t=" + std::to_string(t + 1) +
                 "; minimum preference undefined");
    }
  }
  double global = kInf;
  for (int t = 0; t < T; ++t) global = std::min(global, per_time[t]);

  for (int t = 0; t < T; ++t) {
    double pref = mode == PreferenceMode::PerTimeMin ? per_time[t]
                  : mode == PreferenceMode::GlobalMin ? global
                                                      : constant;
    for (int i = 0; i < n; ++i)
      if (ds.active(t, i)) sim.s(t, i, i) = pref;
  }
  sim.note_preferences_set();
}

}  // namespace eap
