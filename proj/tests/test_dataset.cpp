#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "eap/dataset.hpp"
#include "eap/errors.hpp"

using namespace eap;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("/tmp/eap-test-") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv identity case") {
  auto path = write_temp("basic.csv",
                         "id,t,f0,f1\n"
                         "a,1,0.5,1.0\n"
                         "b,1,2.0,3.0\n");
  DatasetSeries ds = load_csv(path);
  CHECK(ds.n_points() == 2);
  CHECK(ds.time_steps() == 1);
  CHECK(ds.feature_dim() == 2);
  CHECK(ds.active(0, 0));
  CHECK(ds.active(0, 1));
  CHECK(ds.feature(0, 1, 1) == 3.0);
}

TEST_CASE("activity inferred from row presence") {
  auto path = write_temp("activity.csv",
                         "id,t,f0\n"
                         "a,1,1.0\n"
                         "a,2,2.0\n"
                         "b,2,5.0\n");
  DatasetSeries ds = load_csv(path);
  CHECK(ds.active(0, 0));
  CHECK_FALSE(ds.active(0, 1));  // b absent at t=1
  CHECK(ds.active(1, 1));
}

TEST_CASE("inconsistent feature dimension is a schema error") {
  auto path = write_temp("baddim.csv",
                         "id,t,f0,f1,f2\n"
                         "a,1,1,2,3\n"
                         "b,1,1,2\n");
  CHECK_THROWS_AS(load_csv(path), Error);
}

TEST_CASE("duplicate (id, t) rejected") {
  auto path = write_temp("dup.csv",
                         "id,t,f0\n"
                         "a,1,1\n"
                         "a,1,2\n");
  try {
    load_csv(path);
    FAIL("expected duplicate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Duplicate);
  }
}

TEST_CASE("empty file rejected") {
  auto path = write_temp("empty.csv", "id,t,f0\n");
  try {
    load_csv(path);
    FAIL("expected empty-dataset error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDataset);
  }
}

TEST_CASE("missing cells imputed from last known value and flagged") {
  auto path = write_temp("impute.csv",
                         "id,t,f0,f1\n"
                         "a,1,1.0,7.0\n"
                         "a,2,,8.0\n"
                         "a,3,3.0,\n"
                         "b,1,,4.0\n"  // leading gap: first known value
                         "b,2,9.0,5.0\n");
  DatasetSeries ds = load_csv(path);
  CHECK(ds.feature(1, 0, 0) == 1.0);  // carried forward
  CHECK(ds.imputed_cell(1, 0, 0));
  CHECK_FALSE(ds.imputed_cell(1, 0, 1));
  CHECK(ds.feature(2, 0, 1) == 8.0);
  CHECK(ds.imputed_cell(2, 0, 1));
  CHECK(ds.feature(0, 1, 0) == 9.0);  // backfilled from first known
  CHECK(ds.imputed_cell(0, 1, 0));
  CHECK(ds.imputed_any(1, 0));
  CHECK_FALSE(ds.imputed_any(0, 0));
}

TEST_CASE("csv round trip preserves everything including imputation flags") {
  auto path = write_temp("round.csv",
                         "id,t,f0,f1,label\n"
                         "x,2,1.5,2.5,0\n"  // appears before w on purpose
                         "w,1,0.25,,1\n"
                         "w,2,4.0,5.0,\n"
                         "x,3,2.5,3.5,0\n");
  DatasetSeries first = load_csv(path);
  auto path2 = write_temp("round2.csv", "");
  save_csv(first, path2);
  DatasetSeries second = load_csv(path2);
  CHECK(first == second);
  auto path3 = write_temp("round3.csv", "");
  save_csv(second, path3);
  DatasetSeries third = load_csv(path3);
  CHECK(first == third);
}

TEST_CASE("normalize_global hits the hand-computed case") {
  // single feature, values {1, 3}: mean 2, population std 1 -> {-1, 1}
  DatasetSeries ds({"a", "b"}, 1, 1);
  ds.set_point(0, 0, {1.0});
  ds.set_point(0, 1, {3.0});
  DatasetSeries out = normalize_global(ds);
  CHECK(out.feature(0, 0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(out.feature(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalize_global is idempotent within 1e-9") {
  DatasetSeries ds({"a", "b", "c"}, 2, 2);
  ds.set_point(0, 0, {1.0, -4.0});
  ds.set_point(0, 1, {2.0, 0.5});
  ds.set_point(0, 2, {5.0, 2.0});
  ds.set_point(1, 0, {0.0, 1.0});
  ds.set_point(1, 1, {3.0, 2.5});
  ds.set_point(1, 2, {-2.0, 8.0});
  DatasetSeries once = normalize_global(ds);
  DatasetSeries twice = normalize_global(once);
  for (int t = 0; t < 2; ++t)
    for (int i = 0; i < 3; ++i)
      for (int f = 0; f < 2; ++f)
        CHECK(std::abs(once.feature(t, i, f) - twice.feature(t, i, f)) <
              1e-9);
  // and the moments really are 0 / 1
  for (int f = 0; f < 2; ++f) {
    double mean = 0, sq = 0;
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < 3; ++i) mean += once.feature(t, i, f);
    mean /= 6.0;
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < 3; ++i) {
        double d = once.feature(t, i, f) - mean;
        sq += d * d;
      }
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(sq / 6.0) - 1.0) < 1e-9);
  }
}

TEST_CASE("normalize_global names the degenerate dimension") {
  DatasetSeries ds({"a", "b"}, 1, 2);
  ds.set_point(0, 0, {1.0, 5.0});
  ds.set_point(0, 1, {2.0, 5.0});
  try {
    normalize_global(ds);
    FAIL("expected degenerate-feature error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateFeature);
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
}

TEST_CASE("piecewise normalized derivative hand case") {
  // prices [1, 2, 4] in one window -> diffs [1, 2] -> normalized [-1, 1]
  DatasetSeries ds({"s"}, 3, 1);
  ds.set_point(0, 0, {1.0});
  ds.set_point(1, 0, {2.0});
  ds.set_point(2, 0, {4.0});
  DatasetSeries out = piecewise_normalized_derivative(ds, 3);
  CHECK(out.time_steps() == 1);
  CHECK(out.feature_dim() == 2);
  CHECK(out.feature(0, 0, 0) == doctest::Approx(-1.0));
  CHECK(out.feature(0, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("piecewise derivative: linear series is degenerate") {
  DatasetSeries ds({"s"}, 3, 1);
  ds.set_point(0, 0, {1.0});
  ds.set_point(1, 0, {2.0});
  ds.set_point(2, 0, {3.0});
  try {
    piecewise_normalized_derivative(ds, 3);
    FAIL("expected insufficient-data error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientData);
  }
}

TEST_CASE("piecewise derivative: two windows of a 6-sample series") {
  DatasetSeries ds({"s"}, 6, 1);
  double prices[6] = {1, 2, 4, 5, 9, 10};
  for (int t = 0; t < 6; ++t) ds.set_point(t, 0, {prices[t]});
  DatasetSeries out = piecewise_normalized_derivative(ds, 3);
  CHECK(out.time_steps() == 2);
  CHECK(out.feature_dim() == 2);
}

TEST_CASE("piecewise derivative: partial presence below 3 observations") {
  DatasetSeries ds({"s", "r"}, 3, 1);
  ds.set_point(0, 0, {1.0});
  ds.set_point(1, 0, {2.0});
  ds.set_point(2, 0, {4.0});
  ds.set_point(1, 1, {1.0});
  ds.set_point(2, 1, {2.0});  // r has only 2 observations in the window
  CHECK_THROWS_AS(piecewise_normalized_derivative(ds, 3), Error);
}

TEST_CASE("every point must be active somewhere") {
  DatasetSeries ds({"a", "b"}, 1, 1);
  ds.set_point(0, 0, {1.0});
  CHECK_THROWS_AS(ds.validate(), Error);
}
