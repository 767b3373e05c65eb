#include "eap/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "eap/errors.hpp"
#include "eap/rng.hpp"

namespace eap {

namespace {

// Stream channels; draws are keyed (seed, scenario*8+channel, t, entity).
enum Channel { kPosition = 0, kWalk = 1, kSwitch = 2 };

int scenario_id(GaussianKind k) {
  switch (k) {
    case GaussianKind::Separated: return 1;
    case GaussianKind::Colliding: return 2;
    case GaussianKind::ClusterChange: return 3;
    case GaussianKind::ThirdCluster: return 4;
  }
  return 0;
}

std::vector<std::string> make_point_ids(int n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "p%03d", i);
    ids.emplace_back(buf);
  }
  return ids;
}

}  // namespace

DatasetSeries gen_gaussian(const GaussianScenario& sc) {
  const bool separated = sc.kind == GaussianKind::Separated;
  const int T = sc.time_steps > 0 ? sc.time_steps : (separated ? 40 : 25);
  const int n = sc.n_points;
  if (n < 2) fail(ErrorKind::Config, "scenario needs at least 2 points");
  const int sid = scenario_id(sc.kind);

  DatasetSeries ds(make_point_ids(n), T, 2);

  // Initial round-robin mixture assignment: exactly uniform weights.
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = i % 2;

  double mean[3][2];
  if (separated) {
    mean[0][0] = -4.0; mean[0][1] = 0.0;
    mean[1][0] = 4.0;  mean[1][1] = 0.0;
  } else {
    mean[0][0] = -3.0; mean[0][1] = -3.0;
    mean[1][0] = 3.0;  mean[1][1] = 3.0;
  }
  mean[2][0] = -3.0; mean[2][1] = -3.0;  // third component, when it appears

  for (int t = 0; t < T; ++t) {
    const int tt = t + 1;  // 1-based, matching the recipes
    if (tt >= 2) {
      if (separated) {
        for (int c = 0; c < 2; ++c) {
          SplitMix64 rng(stream_key(sc.seed, sid * 8 + kWalk, tt, c));
          mean[c][0] += rng.uniform01() < 0.5 ? -0.1 : 0.1;
        }
      } else if (tt <= 9) {
        mean[0][0] += 0.4;
        mean[0][1] += 0.4;
      }
    }
    double sigma = 1.0;
    if (separated) sigma = tt >= 19 ? std::sqrt(0.3) : std::sqrt(0.1);

    if ((sc.kind == GaussianKind::ClusterChange ||
         sc.kind == GaussianKind::ThirdCluster) &&
        (tt == 10 || tt == 11)) {
      const int target = sc.kind == GaussianKind::ClusterChange ? 0 : 2;
      for (int i = 0; i < n; ++i) {
        if (comp[i] != 1) continue;
        SplitMix64 rng(stream_key(sc.seed, sid * 8 + kSwitch, tt, i));
        if (rng.uniform01() < 0.25) comp[i] = target;
      }
    }

    for (int i = 0; i < n; ++i) {
      SplitMix64 rng(stream_key(sc.seed, sid * 8 + kPosition, tt, i));
      std::vector<double> x(2);
      x[0] = mean[comp[i]][0] + sigma * rng.gaussian();
      x[1] = mean[comp[i]][1] + sigma * rng.gaussian();
      ds.set_point(t, i, x, comp[i]);
    }
  }
  return ds;
}

DatasetSeries gen_separated(std::uint64_t seed, int n_points) {
  return gen_gaussian({GaussianKind::Separated, n_points, 0, seed});
}
DatasetSeries gen_colliding(std::uint64_t seed, int n_points) {
  return gen_gaussian({GaussianKind::Colliding, n_points, 0, seed});
}
DatasetSeries gen_cluster_change(std::uint64_t seed, int n_points) {
  return gen_gaussian({GaussianKind::ClusterChange, n_points, 0, seed});
}
DatasetSeries gen_third_cluster(std::uint64_t seed, int n_points) {
  return gen_gaussian({GaussianKind::ThirdCluster, n_points, 0, seed});
}

DatasetSeries normalize_synthetic(const DatasetSeries& ds) {
  const int F = ds.feature_dim();
  DatasetSeries out = ds;
  for (int f = 0; f < F; ++f) {
    double sum = 0.0;
    long count = 0;
    for (int t = 0; t < ds.time_steps(); ++t)
      for (int i = 0; i < ds.n_points(); ++i)
        if (ds.active(t, i)) {
          sum += ds.feature(t, i, f);
          ++count;
        }
    double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (int t = 0; t < ds.time_steps(); ++t)
      for (int i = 0; i < ds.n_points(); ++i)
        if (ds.active(t, i)) {
          double d = ds.feature(t, i, f) - mean;
          sq += d * d;
        }
    double stddev = std::sqrt(sq / static_cast<double>(count));
    if (!(stddev > 0.0))
      fail(ErrorKind::DegenerateFeature,
           "feature " + std::to_string(f) + " has zero variance");
    for (int t = 0; t < ds.time_steps(); ++t)
      for (int i = 0; i < ds.n_points(); ++i) {
        if (!ds.active(t, i)) continue;
        std::vector<double> x(F);
        for (int g = 0; g < F; ++g) x[g] = out.feature(t, i, g);
        x[f] = (ds.feature(t, i, f) - mean) / stddev;
        std::optional<int> lab;
        if (ds.has_label(t, i)) lab = ds.label(t, i);
        out.set_point(t, i, x, lab);
      }
  }
  return out;
}

GaussianKind gaussian_kind_from_name(const std::string& name) {
  if (name == "separated") return GaussianKind::Separated;
  if (name == "colliding") return GaussianKind::Colliding;
  if (name == "cluster-change") return GaussianKind::ClusterChange;
  if (name == "third-cluster") return GaussianKind::ThirdCluster;
  fail(ErrorKind::Config,
       "unknown scenario '" + name +
           "' (expected separated|colliding|cluster-change|third-cluster)");
}

std::string gaussian_kind_name(GaussianKind kind) {
  switch (kind) {
    case GaussianKind::Separated: return "separated";
    case GaussianKind::Colliding: return "colliding";
    case GaussianKind::ClusterChange: return "cluster-change";
    case GaussianKind::ThirdCluster: return "third-cluster";
  }
  return "?";
}

}  // namespace eap
