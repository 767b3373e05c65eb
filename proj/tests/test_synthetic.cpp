#include <doctest.h>

#include <cmath>
#include <map>

#include "eap/dataset.hpp"
#include "eap/synthetic.hpp"

using namespace eap;

TEST_CASE("separated: shape and determinism") {
  DatasetSeries a = gen_separated(7);
  CHECK(a.n_points() == 200);
  CHECK(a.time_steps() == 40);
  CHECK(a.feature_dim() == 2);
  DatasetSeries b = gen_separated(7);
  CHECK(a == b);
  DatasetSeries c = gen_separated(8);
  CHECK_FALSE(a == c);
}

TEST_CASE("separated: label histogram exactly uniform") {
  DatasetSeries ds = gen_separated(3);
  std::map<int, int> hist;
  for (int i = 0; i < ds.n_points(); ++i) ++hist[ds.label(0, i)];
  CHECK(hist[0] == 100);
  CHECK(hist[1] == 100);
}

TEST_CASE("separated: initial means and covariance change at t=19") {
  DatasetSeries ds = gen_separated(5, 2000);
  auto component_stats = [&](int t, int label, int dim) {
    double sum = 0, sq = 0;
    int n = 0;
    for (int i = 0; i < ds.n_points(); ++i) {
      if (ds.label(t, i) != label) continue;
      sum += ds.feature(t, i, dim);
      ++n;
    }
    double mean = sum / n;
    for (int i = 0; i < ds.n_points(); ++i) {
      if (ds.label(t, i) != label) continue;
      double d = ds.feature(t, i, dim) - mean;
      sq += d * d;
    }
    return std::pair<double, double>(mean, std::sqrt(sq / n));
  };
  auto [m0, s0] = component_stats(0, 0, 0);
  auto [m1, s1] = component_stats(0, 1, 0);
  // 3 sigma / sqrt(n) tolerance with sigma = sqrt(0.1), n = 1000
  CHECK(std::abs(m0 - (-4.0)) < 3 * std::sqrt(0.1) / std::sqrt(1000.0));
  CHECK(std::abs(m1 - 4.0) < 3 * std::sqrt(0.1) / std::sqrt(1000.0));
  CHECK(s0 == doctest::Approx(std::sqrt(0.1)).epsilon(0.15));
  // covariance widens to 0.3*I from t=19 (1-based)
  auto [m18, s18] = component_stats(18, 0, 1);
  CHECK(s18 == doctest::Approx(std::sqrt(0.3)).epsilon(0.15));
  (void)m18;
}

TEST_CASE("colliding: first component mean reaches [0.2, 0.2] at t=9") {
  DatasetSeries ds = gen_colliding(2, 4000);
  double sum0 = 0, sum1 = 0;
  int n = 0;
  for (int i = 0; i < ds.n_points(); ++i) {
    if (ds.label(8, i) != 0) continue;  // t=9, component 1
    sum0 += ds.feature(8, i, 0);
    sum1 += ds.feature(8, i, 1);
    ++n;
  }
  // -3 + 8 * 0.4 = 0.2; tolerance 3 sigma / sqrt(n)
  double tol = 3.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum0 / n - 0.2) < tol);
  CHECK(std::abs(sum1 / n - 0.2) < tol);
  CHECK(ds.time_steps() == 25);
}

TEST_CASE("cluster change: switch fraction matches 1 - 0.75^2") {
  DatasetSeries ds = gen_cluster_change(4, 4000);
  int was_two = 0, switched = 0;
  for (int i = 0; i < ds.n_points(); ++i) {
    if (ds.label(0, i) != 1) continue;
    ++was_two;
    if (ds.label(11, i) == 0) ++switched;  // t=12: after both switch steps
  }
  double frac = static_cast<double>(switched) / was_two;
  double expect = 1.0 - 0.75 * 0.75;
  CHECK(std::abs(frac - expect) < 3 * std::sqrt(expect * (1 - expect) /
                                                static_cast<double>(was_two)));
  // membership frozen after t=11
  for (int i = 0; i < ds.n_points(); ++i)
    for (int t = 11; t < ds.time_steps(); ++t)
      CHECK(ds.label(t, i) == ds.label(11, i));
}

TEST_CASE("third cluster: defectors appear at t=10 and center near [-3,-3]") {
  DatasetSeries ds = gen_third_cluster(6, 2000);
  std::map<int, int> hist;
  for (int i = 0; i < ds.n_points(); ++i) ++hist[ds.label(9, i)];
  CHECK(hist.size() == 3);
  CHECK(hist[2] > 0);
  double sum0 = 0, sum1 = 0;
  int n = 0;
  for (int i = 0; i < ds.n_points(); ++i) {
    if (ds.label(12, i) != 2) continue;
    sum0 += ds.feature(12, i, 0);
    sum1 += ds.feature(12, i, 1);
    ++n;
  }
  double tol = 3.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum0 / n - (-3.0)) < tol);
  CHECK(std::abs(sum1 / n - (-3.0)) < tol);
}

TEST_CASE("normalize_synthetic matches normalize_global") {
  DatasetSeries raw = gen_colliding(9, 50);
  DatasetSeries a = normalize_synthetic(raw);
  DatasetSeries b = normalize_global(raw);
  for (int t = 0; t < raw.time_steps(); ++t)
    for (int i = 0; i < raw.n_points(); ++i)
      for (int f = 0; f < raw.feature_dim(); ++f)
        CHECK(a.feature(t, i, f) ==
              doctest::Approx(b.feature(t, i, f)).epsilon(1e-12));
}

TEST_CASE("normalize_synthetic: zero mean and idempotent") {
  DatasetSeries ds = normalize_synthetic(gen_separated(11, 40));
  for (int f = 0; f < 2; ++f) {
    double mean = 0;
    long n = 0;
    for (int t = 0; t < ds.time_steps(); ++t)
      for (int i = 0; i < ds.n_points(); ++i) {
        mean += ds.feature(t, i, f);
        ++n;
      }
    CHECK(std::abs(mean / n) < 1e-9);
  }
  DatasetSeries again = normalize_synthetic(ds);
  for (int t = 0; t < ds.time_steps(); ++t)
    for (int i = 0; i < ds.n_points(); ++i)
      for (int f = 0; f < 2; ++f)
        CHECK(std::abs(ds.feature(t, i, f) - again.feature(t, i, f)) < 1e-9);
}

TEST_CASE("generators dump to the CSV schema with labels") {
  DatasetSeries ds = gen_colliding(1, 10);
  save_csv(ds, "/tmp/eap-test-gen.csv");
  DatasetSeries back = load_csv("/tmp/eap-test-gen.csv");
  CHECK(back.n_points() == 10);
  CHECK(back.time_steps() == 25);
  CHECK(back.has_label(0, 0));
  CHECK(back.label(0, 0) == ds.label(0, 0));
}
